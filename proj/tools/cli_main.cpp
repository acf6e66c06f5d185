#include <CLI11.hpp>

#include <iostream>
#include <stdexcept>

#include "commands.hpp"
#include "sandharm/io.hpp"

using namespace sandharm::cli;

namespace {

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "seed for the random suites (mt19937_64)");
    app->add_option("--manifest", c.manifest, "write a JSON run manifest to this path");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sandharm: sandpiles, lattice Green functions and the xi maps"};
    app.require_subcommand(1);
    int code = kPass;

    GreenOpts go;
    auto* green = app.add_subcommand("green", "tabulate the lattice Green function on Q_R");
    add_common(green, go.common);
    green->add_option("--d", go.d, "dimension")->check(CLI::Range(1, 6));
    green->add_option("--gamma", go.gamma, "diagonal of the Laplacian (default 2d)");
    green->add_option("--radius", go.radius, "table radius R")->check(CLI::NonNegativeNumber);
    green->add_option("--nodes", go.nodes, "coarsest torus size")->check(CLI::PositiveNumber);
    green->add_option("--treatment", go.treatment, "singularity treatment: none|subtraction");
    green->add_option("--target", go.target, "target absolute error (0 = default)")->check(CLI::NonNegativeNumber);
    green->add_option("--oracle-radius", go.oracle_radius, "compare with the walk series on |n|_max <= this");
    green->add_option("--out", go.out, "CSV output path");
    green->callback([&] { code = run_green(go); });

    SandpileOpts so;
    auto* sand = app.add_subcommand("sandpile", "sandpile operations on finite windows");
    sand->require_subcommand(1);
    auto* stab = sand->add_subcommand("stabilize", "stabilise a grid, write the stable grid and odometer");
    add_common(stab, so.common);
    stab->add_option("--grid", so.grid, "input grid file")->required();
    stab->add_option("--out", so.out, "output prefix");
    stab->callback([&] { code = run_stabilize(so); });
    auto* burn = sand->add_subcommand("burn", "burning test: exit 0 recurrent, 1 forbidden");
    add_common(burn, so.common);
    burn->add_option("--grid", so.grid, "input grid file")->required();
    burn->add_option("--out", so.out, "JSON burn report path");
    burn->callback([&] { code = run_burn(so); });
    auto* count = sand->add_subcommand("count", "count recurrent configurations");
    add_common(count, so.common);
    count->add_option("--window", so.window, "extents such as 2x2 or 4x4x4");
    count->add_option("--gamma", so.gamma, "diagonal (default 2d)");
    count->add_option("--backend", so.backend, "brute|det|both");
    count->callback([&] { code = run_count(so); });
    auto* ent = sand->add_subcommand("entropy", "finite-volume entropy estimates and the quadrature reference");
    add_common(ent, so.common);
    ent->add_option("--d", so.d, "dimension")->check(CLI::Range(1, 6));
    ent->add_option("--gamma", so.gamma, "diagonal (default 2d)");
    ent->add_option("--sides", so.sides, "cube sides")->delimiter(',');
    ent->add_option("--out", so.out, "CSV output path");
    ent->callback([&] { code = run_entropy(so); });
    auto* corr = sand->add_subcommand("correct", "add h*f supported on Q_M to make Q_M recurrent");
    add_common(corr, so.common);
    corr->add_option("--grid", so.grid, "input grid (centred on the origin)")->required();
    corr->add_option("--M", so.M, "radius of Q_M")->check(CLI::PositiveNumber);
    corr->add_option("--out", so.out, "corrected grid path");
    corr->callback([&] { code = run_correct(so); });

    XiOpts xo;
    auto* xi = app.add_subcommand("xi", "the xi maps into the harmonic model");
    xi->require_subcommand(1);
    auto* apply = xi->add_subcommand("apply", "evaluate xi_g on a grid (TorusPoint CSV)");
    add_common(apply, xo.common);
    apply->add_option("--g", xo.g, "generator name (g1, g2, ...), f, or a polynomial expression");
    apply->add_option("--grid", xo.grid, "input grid (centred on the origin)")->required();
    apply->add_option("--ext", xo.ext, "auto|constant|zero|periodic (auto: constant for recurrent grids)");
    apply->add_option("--c", xo.c, "value outside the window for the constant extension (default 2d-1)");
    apply->add_option("--radius", xo.radius, "Green table radius");
    apply->add_option("--target", xo.target, "Green table target error");
    apply->add_option("--out", xo.out, "CSV output path");
    apply->callback([&] { code = run_xi_apply(xo); });
    auto* check = xi->add_subcommand("check", "run the invariant suites");
    add_common(check, xo.common);
    check->add_option("--suite", xo.suite,
                      "harmonicity|equivariance|kernel|intertwining|separation|additivity|all");
    check->add_option("--d", xo.d, "dimension")->check(CLI::Range(2, 3));
    check->add_option("--count", xo.count, "random configurations per suite")->check(CLI::PositiveNumber);
    check->add_option("--pairs", xo.pairs, "separation pairs")->check(CLI::PositiveNumber);
    check->add_option("--radius", xo.radius, "Green table radius");
    check->add_option("--target", xo.target, "Green table target error");
    check->callback([&] { code = run_xi_check(xo); });
    auto* demo = xi->add_subcommand("demo-addition", "grain addition as addition of a homoclinic point");
    add_common(demo, xo.common);
    demo->add_option("--d", xo.d, "dimension")->check(CLI::Range(2, 3));
    demo->add_option("--count", xo.count, "number of grains")->check(CLI::PositiveNumber);
    demo->add_option("--radius", xo.radius, "Green table radius");
    demo->callback([&] { code = run_xi_demo_addition(xo); });

    IdealOpts io;
    auto* ideal = app.add_subcommand("ideal", "membership certificate for the ideal I_d");
    add_common(ideal, io.common);
    ideal->add_option("--d", io.d, "dimension")->check(CLI::Range(1, 6));
    ideal->add_option("--gamma", io.gamma, "diagonal used by the aliases f, fg (default 2d)");
    ideal->add_option("--poly", io.poly, "inline polynomial, e.g. \"(1-u1)^3\" or g2");
    ideal->add_option("--file", io.file, "polynomial text file (k1 ... kd : coeff per line)");
    ideal->add_flag("--decay", io.decay, "also fit the decay of g* . w");
    ideal->add_option("--radius", io.radius, "table radius for --decay");
    ideal->callback([&] { code = run_ideal(io); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kInputError;
    } catch (const sandharm::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kToleranceFailure;
    }
    return code;
}
