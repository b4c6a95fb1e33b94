#include <CLI11.hpp>

#include "cli_common.hpp"
#include "cmd_divided_powers.hpp"

using namespace soergel;
using namespace soergel::cli;

int main(int argc, char** argv) {
    CLI::App app{"exact engine for one- and two-color diagrammatic calculus"};
    app.require_subcommand(1);
    argv = app.ensure_utf8(argv);

    Common opt;
    auto* sc_verify = app.add_subcommand(
        "verify-relations", "check the defining relations and their differentials");
    auto* sc_classify =
        app.add_subcommand("classify", "classify good differentials over the configured graph");
    auto* sc_fc = app.add_subcommand(
        "fc-analyze", "analyze filtration graphs of one- and two-color expressions");
    auto* sc_smalln = app.add_subcommand(
        "small-n", "filtration and partial order census for small symmetric groups");
    auto* sc_s8 = app.add_subcommand(
        "s8", "the fourteen-letter counterexample word (long; needs --allow-long)");
    auto* sc_dp = app.add_subcommand(
        "divided-powers", "integrality of divided powers and nilpotence at a prime");
    for (auto* sc : {sc_verify, sc_classify, sc_fc, sc_smalln, sc_s8, sc_dp})
        add_common(sc, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RingSpec rs = RingSpec::parse(opt.ring);
        RunConfig cfg = RunConfig::load(opt.config_path);

        Report rep;
        if (sc_dp->parsed()) {
            rep = with_ring(rs, [&](auto ctx) { return cmd_divided_powers(cfg, opt, ctx); });
        } else {
            std::cerr << "soergel: this subcommand is not wired up yet\n";
            return 2;
        }
        rep.with_timings = opt.timings;
        emit(rep, opt);
        return rep.exit_code();
    } catch (const Error& e) {
        std::cerr << "soergel: " << e.what() << "\n";
        return 2;
    }
}
