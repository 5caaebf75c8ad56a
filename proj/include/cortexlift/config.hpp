#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cortexlift/kv.hpp"
#include "cortexlift/stimuli.hpp"
#include "cortexlift/wilson_cowan.hpp"

namespace cortexlift {

// One batch run: stimulus, model selection, solver parameters, dump flags.
// Stored as flat key=value text; stimulus fields carry a "stimulus." prefix,
// solver parameters appear under their plain names.
struct RunConfig {
    WCParams params;
    int K = 30;
    int bw = 4;
    bool taper = false;
    bool model3d = true;
    bool fast = true;
    int degree = 11;

    std::string stimulus_type = "grating";  // grating | poggendorff | image
    GratingSpec grating;
    PoggendorffSpec pogg;
    std::string image_path;

    std::string out_dir = "out";
    bool dump_lifted = false;
    bool dump_energy = true;
    bool dump_profiles = true;
    bool dump_metrics = true;

    std::string to_kv() const {
        std::ostringstream out;
        out << "model=" << (model3d ? "3d" : "2d") << "\n"
            << "fast=" << (fast ? 1 : 0) << "\n"
            << "degree=" << degree << "\n"
            << "K=" << K << "\n"
            << "bw=" << bw << "\n"
            << "taper=" << (taper ? 1 : 0) << "\n"
            << "alpha=" << kv_num(params.alpha) << "\n"
            << "lambda=" << kv_num(params.lambda) << "\n"
            << "M=" << kv_num(params.M) << "\n"
            << "sigma_mu=" << kv_num(params.sigma_mu) << "\n"
            << "sigma_omega=" << kv_num(params.sigma_omega) << "\n"
            << "sigma_theta=" << kv_num(params.sigma_theta) << "\n"
            << "dt=" << kv_num(params.dt) << "\n"
            << "tau=" << kv_num(params.tau) << "\n"
            << "max_iters=" << params.max_iters << "\n"
            << "out=" << out_dir << "\n"
            << "dump_lifted=" << (dump_lifted ? 1 : 0) << "\n"
            << "dump_energy=" << (dump_energy ? 1 : 0) << "\n"
            << "dump_profiles=" << (dump_profiles ? 1 : 0) << "\n"
            << "dump_metrics=" << (dump_metrics ? 1 : 0) << "\n";
        if (stimulus_type == "image") {
            out << "stimulus.type=image\nstimulus.path=" << image_path << "\n";
        } else {
            std::istringstream spec(stimulus_type == "grating" ? grating.to_kv()
                                                               : pogg.to_kv());
            std::string line;
            while (std::getline(spec, line))
                if (!line.empty()) out << "stimulus." << line << "\n";
        }
        return out.str();
    }

    static RunConfig from_kv(const KvMap& kv) {
        RunConfig c;
        const std::string model = kv_get_str(kv, "model", "3d");
        if (model != "3d" && model != "2d")
            throw std::runtime_error("config: model must be 3d or 2d");
        c.model3d = model == "3d";
        c.fast = kv_get_num(kv, "fast", 1) != 0;
        c.degree = int(kv_get_num(kv, "degree", c.degree));
        c.K = int(kv_get_num(kv, "K", c.K));
        c.bw = int(kv_get_num(kv, "bw", c.bw));
        c.taper = kv_get_num(kv, "taper", 0) != 0;
        c.params.alpha = kv_get_num(kv, "alpha", c.params.alpha);
        c.params.lambda = kv_get_num(kv, "lambda", c.params.lambda);
        c.params.M = kv_get_num(kv, "M", c.params.M);
        c.params.sigma_mu = kv_get_num(kv, "sigma_mu", c.params.sigma_mu);
        c.params.sigma_omega = kv_get_num(kv, "sigma_omega", c.params.sigma_omega);
        c.params.sigma_theta = kv_get_num(kv, "sigma_theta", c.params.sigma_theta);
        c.params.dt = kv_get_num(kv, "dt", c.params.dt);
        c.params.tau = kv_get_num(kv, "tau", c.params.tau);
        c.params.max_iters = int(kv_get_num(kv, "max_iters", c.params.max_iters));
        c.out_dir = kv_get_str(kv, "out", c.out_dir);
        c.dump_lifted = kv_get_num(kv, "dump_lifted", 0) != 0;
        c.dump_energy = kv_get_num(kv, "dump_energy", 1) != 0;
        c.dump_profiles = kv_get_num(kv, "dump_profiles", 1) != 0;
        c.dump_metrics = kv_get_num(kv, "dump_metrics", 1) != 0;

        KvMap stim;
        for (const auto& [key, val] : kv)
            if (key.rfind("stimulus.", 0) == 0) stim[key.substr(9)] = val;
        c.stimulus_type = kv_get_str(stim, "type", "grating");
        if (c.stimulus_type == "grating") {
            c.grating = GratingSpec::from_kv(stim);
        } else if (c.stimulus_type == "poggendorff") {
            c.pogg = PoggendorffSpec::from_kv(stim);
        } else if (c.stimulus_type == "image") {
            c.image_path = kv_get_str(stim, "path");
            if (c.image_path.empty()) throw std::runtime_error("config: stimulus.path missing");
        } else {
            throw std::runtime_error("config: unknown stimulus.type " + c.stimulus_type);
        }
        return c;
    }

    Image render_stimulus() const {
        if (stimulus_type == "grating") return grating_induction(grating);
        if (stimulus_type == "poggendorff") return poggendorff(pogg);
        return load_image(image_path);
    }

    void validate() const {
        params.validate();
        if (K < 1) throw std::runtime_error("config: K must be >= 1");
        if (bw < 1) throw std::runtime_error("config: bw must be >= 1");
        if (degree < 1 || degree % 2 == 0)
            throw std::runtime_error("config: degree must be odd and >= 1");
        if (stimulus_type == "grating") grating.validate();
        if (stimulus_type == "poggendorff") pogg.validate();
    }
};

inline nlohmann::json manifest_json(const RunConfig& c, const EvolutionState& st,
                                    double wall_seconds) {
    nlohmann::json j;
    j["model"] = c.model3d ? "3d" : "2d";
    j["fast"] = c.fast;
    j["degree"] = c.degree;
    j["K"] = c.K;
    j["bw"] = c.bw;
    j["taper"] = c.taper;
    j["alpha"] = c.params.alpha;
    j["lambda"] = c.params.lambda;
    j["M"] = c.params.M;
    j["sigma_mu"] = c.params.sigma_mu;
    j["sigma_omega"] = c.params.sigma_omega;
    j["sigma_theta"] = c.params.sigma_theta;
    j["dt"] = c.params.dt;
    j["tau"] = c.params.tau;
    j["max_iters"] = c.params.max_iters;
    j["stimulus"] = nlohmann::json::object();
    if (c.stimulus_type == "image") {
        j["stimulus"]["type"] = "image";
        j["stimulus"]["path"] = c.image_path;
    } else {
        for (const auto& [k, v] :
             parse_kv(c.stimulus_type == "grating" ? c.grating.to_kv() : c.pogg.to_kv()))
            j["stimulus"][k] = v;
    }
    j["iterations"] = st.iter;
    j["converged"] = st.converged;
    j["last_rel_change"] = st.last_rel_change;
    j["wall_seconds"] = wall_seconds;
    return j;
}

}  // namespace cortexlift
