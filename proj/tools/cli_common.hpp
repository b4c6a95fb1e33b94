#pragma once

// Shared option plumbing for the command line surface: every subcommand
// carries the same ring / config / report / seed flags, and dispatches over
// the chosen coefficient ring at one place.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "soergel/config.hpp"
#include "soergel/report.hpp"

namespace soergel::cli {

struct Common {
    std::string config_path;
    std::string ring = "Z";
    std::string report = "text";
    unsigned long long seed = 0;
    bool allow_long = false;
    bool timings = false;
    unsigned jobs = 1;
};

inline void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "JSON config file");
    sub->add_option("--ring", c.ring, "coefficient ring: Z, Q or Fp:<p>")
        ->default_str("Z");
    sub->add_option("--report", c.report, "report style: text or structured")
        ->check(CLI::IsMember({"text", "structured"}))
        ->default_str("text");
    sub->add_option("--seed", c.seed, "seed for sampled checks")->default_str("0");
    sub->add_flag("--allow-long", c.allow_long, "permit long-running computations");
    sub->add_flag("--timings", c.timings, "include wall-clock timings in the report");
    sub->add_option("--jobs", c.jobs, "worker threads for independent checks")
        ->default_str("1");
}

// run f(RingCtx<K>) for the ring named on the command line
template <class F>
Report with_ring(const RingSpec& rs, F&& f) {
    switch (rs.kind) {
        case RingSpec::Kind::integers: return f(RingCtx<Int>{});
        case RingSpec::Kind::rationals: return f(RingCtx<Rat>{});
        case RingSpec::Kind::prime_field: return f(RingCtx<Fp>(rs.p));
    }
    SOERGEL_REQUIRE(false, "unreachable ring kind");
    return {};
}

inline void emit(const Report& rep, const Common& opt) {
    if (opt.report == "structured")
        std::cout << rep.to_json().dump(2) << "\n";
    else
        std::cout << rep.to_text();
}

inline void echo_inputs(Report& rep, const Common& opt) {
    rep.inputs.emplace_back("ring", opt.ring);
    rep.inputs.emplace_back("seed", std::to_string(opt.seed));
    rep.inputs.emplace_back("config", opt.config_path.empty() ? "(defaults)" : opt.config_path);
}

} // namespace soergel::cli
