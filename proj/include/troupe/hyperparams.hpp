#pragma once

#include "troupe/errors.hpp"

namespace troupe {

// Tunables of the trust update chain and the router. Defaults are the
// reference operating point; validate() enforces the dual-timescale
// condition lambda_f > lambda_g.
struct HyperParams {
    double kappa = 0.5;     // divergence penalty coefficient, > 0
    double mu = 0.3;        // short/long EMA mixing weight, in [0,1]
    double gamma = 0.3;     // direct reward injection weight, >= 0
    double lambda_f = 0.3;  // short (reward-tracking) EMA rate, in (0,1]
    double lambda_g = 0.1;  // long (posterior-tracking) EMA rate, in (0,1]
    double ramp_t = 5.0;    // ramp temperature, in units of queries, > 0
    double beta = 5.0;      // role-weight softmax sharpness, >= 0
    int top_k = 3;          // number of agents selected per query, >= 1

    void validate() const {
        if (!(kappa > 0.0)) throw config_error("hyperparams: kappa must be > 0");
        if (!(mu >= 0.0 && mu <= 1.0)) throw config_error("hyperparams: mu must be in [0,1]");
        if (!(gamma >= 0.0)) throw config_error("hyperparams: gamma must be >= 0");
        if (!(lambda_f > 0.0 && lambda_f <= 1.0))
            throw config_error("hyperparams: lambda_f must be in (0,1]");
        if (!(lambda_g > 0.0 && lambda_g <= 1.0))
            throw config_error("hyperparams: lambda_g must be in (0,1]");
        if (!(lambda_f > lambda_g))
            throw config_error("hyperparams: dual-timescale condition requires lambda_f > lambda_g");
        if (!(ramp_t > 0.0)) throw config_error("hyperparams: ramp_t must be > 0");
        if (!(beta >= 0.0)) throw config_error("hyperparams: beta must be >= 0");
        if (top_k < 1) throw config_error("hyperparams: top_k must be >= 1");
    }
};

} // namespace troupe
