#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ttcone/json_io.hpp"
#include "ttcone/ttcone.hpp"

namespace {

using namespace ttcone;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void emit_report(const std::string& path, const std::string& body) {
    if (path == "-")
        std::cout << body;
    else
        write_text_file(path, body);
}

std::string file_digest(const std::string& path) { return digest_hex(read_text_file(path)); }

void append_index_array(std::string& out, const std::vector<Index>& xs) {
    out += '[';
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    out += ']';
}

void append_spectrum(std::string& out, const Vector& sigma) {
    out += '[';
    for (Index i = 0; i < sigma.size(); ++i) {
        if (i) out += ',';
        out += format_double17(sigma(i));
    }
    out += ']';
}

struct CommonPaths {
    std::string base;
    std::string vec;
    std::string tcv;
    std::string out;
    std::string report;
};

int run_random(const Dims& dims, const std::vector<Index>& ranks, const std::vector<Index>& slack,
               std::uint64_t seed, const std::string& out_base, const std::string& out_vec,
               const Tolerance& tol) {
    const Index d = static_cast<Index>(dims.size());
    if (d < 2) throw FormatError("--dims needs at least two modes");
    for (Index n : dims)
        if (n < 1) throw FormatError("--dims entries must be positive");
    if (static_cast<Index>(ranks.size()) != d - 1) throw FormatError("--ranks must have length d-1");
    if (static_cast<Index>(slack.size()) != d - 1) throw FormatError("--slack must have length d-1");
    Index prefix = 1;
    for (Index i = 1; i <= d - 1; ++i) {
        prefix *= dims[static_cast<std::size_t>(i - 1)];
        Index suffix = 1;
        for (Index j = i; j < d; ++j) suffix *= dims[static_cast<std::size_t>(j)];
        if (ranks[static_cast<std::size_t>(i - 1)] > std::min(prefix, suffix))
            throw FormatError("rank " + std::to_string(ranks[static_cast<std::size_t>(i - 1)]) +
                              " at split " + std::to_string(i) + " is not attainable");
    }

    RandomStream rs(seed);
    for (int attempt = 0; attempt < 10; ++attempt) {
        const TTTensor base = left_orthogonalize(tt_random(dims, ranks, rs));
        const RankProfile profile = rank_profile(tt_evaluate(base), tol);
        if (profile.ranks != ranks) continue;
        const TangentConeVector v = random_cone_vector(base, slack, seed + 1);
        write_text_file(out_base, to_json(base));
        write_text_file(out_vec, to_json(tc_evaluate(v)));
        return 0;
    }
    throw FormatError("could not draw a base with the requested exact ranks");
}

int run_extract(const CommonPaths& p, const std::vector<Index>& slack, const Tolerance& tol) {
    const TTTensor base = read_tt_tensor_file(p.base);
    const DenseTensor x = read_dense_tensor_file(p.vec);
    const TangentConeVector v = tc_extract(base, x, slack, tol);
    write_text_file(p.out, to_json(v));
    return 0;
}

int run_eval(const CommonPaths& p) {
    const TangentConeVector v = read_cone_vector_file(p.tcv);
    write_text_file(p.out, to_json(tc_evaluate(v)));
    return 0;
}

int run_retract(const CommonPaths& p) {
    const TangentConeVector v = read_cone_vector_file(p.tcv);
    write_text_file(p.out, to_json(retract(v)));
    return 0;
}

int run_check(const CommonPaths& p, const std::vector<Index>& slack, const Tolerance& tol) {
    const auto start = Clock::now();
    const std::string base_digest = file_digest(p.base);
    const std::string vec_digest = file_digest(p.vec);
    const TTTensor base = read_tt_tensor_file(p.base);
    const DenseTensor x = read_dense_tensor_file(p.vec);
    const ConeMembership mem = tc_membership(base, x, slack, tol);

    std::string body = "{\"command\":\"check\",\"inputs\":{\"base\":\"" + base_digest +
                       "\",\"vec\":\"" + vec_digest + "\"},\"tolerance\":" + format_double17(tol.rank) +
                       ",\"slack\":";
    append_index_array(body, slack);
    body += ",\"member\":";
    body += mem.member ? "true" : "false";
    body += ",\"outcome\":\"";
    body += mem.member ? "member" : "not_member";
    body += "\",\"splits\":[";
    for (std::size_t i = 0; i < mem.splits.size(); ++i) {
        const SplitCertificate& s = mem.splits[i];
        if (i) body += ',';
        body += "{\"split\":" + std::to_string(s.split) +
                ",\"slack\":" + std::to_string(s.slack_bound) +
                ",\"residual_rank\":" + std::to_string(s.residual_rank) + ",\"member\":";
        body += s.member ? "true" : "false";
        body += ",\"spectrum\":";
        append_spectrum(body, s.spectrum);
        body += '}';
    }
    body += "],\"wall_time_ms\":" + format_double17(elapsed_ms(start)) + "}\n";
    emit_report(p.report, body);
    return mem.member ? 0 : 2;
}

int run_verify(const CommonPaths& p, const Tolerance& tol) {
    const auto start = Clock::now();
    const std::string tcv_digest = file_digest(p.tcv);
    const TangentConeVector v = read_cone_vector_file(p.tcv);

    const ConstraintResiduals residuals = tc_constraint_residuals(v);
    const bool residuals_ok = residuals.max() <= 1e-10;

    static const std::vector<Index> secants = {8, 16, 32, 64, 128};
    const SecantReport secant = secant_limit_check(v, secants);

    static const std::vector<double> grid = {1e-1, 1e-2, 1e-3, 1e-4};
    const RetractionOrderFit fit = retraction_order(v, grid);
    const bool order_ok = fit.degenerate || (fit.slope >= 1.9 && fit.slope <= 2.1);

    const bool cert = first_derivative_certificate(v, tol);
    const bool pass = residuals_ok && secant.verdict && order_ok && cert;

    std::string body = "{\"command\":\"verify\",\"inputs\":{\"tcv\":\"" + tcv_digest +
                       "\"},\"tolerance\":" + format_double17(tol.rank) + ",\"outcome\":\"";
    body += pass ? "pass" : "fail";
    body += "\",\"constraints\":{\"u_channel\":" + format_double17(residuals.u_channel) +
            ",\"x_channel\":" + format_double17(residuals.x_channel) +
            ",\"v_channel\":" + format_double17(residuals.v_channel) + ",\"pass\":";
    body += residuals_ok ? "true" : "false";
    body += "},\"secant\":{\"errors\":[";
    for (std::size_t i = 0; i < secant.errors.size(); ++i) {
        if (i) body += ',';
        body += "[" + std::to_string(secant.errors[i].first) + "," +
                format_double17(secant.errors[i].second) + "]";
    }
    body += "],\"verdict\":";
    body += secant.verdict ? "true" : "false";
    body += ",\"degenerate\":";
    body += secant.degenerate ? "true" : "false";
    body += ",\"estimated_rate\":" + format_double17(secant.estimated_rate);
    body += "},\"retraction_order\":{\"slope\":" + format_double17(fit.slope) + ",\"degenerate\":";
    body += fit.degenerate ? "true" : "false";
    body += ",\"pass\":";
    body += order_ok ? "true" : "false";
    body += "},\"first_derivative_certificate\":";
    body += cert ? "true" : "false";
    body += ",\"wall_time_ms\":" + format_double17(elapsed_ms(start)) + "}\n";
    emit_report(p.report, body);
    return pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tensor-train tangent cone toolkit"};
    app.require_subcommand(1);

    double tol_value = 1e-12;
    app.add_option("--tol", tol_value, "rank tolerance shared by all rank decisions")
        ->envname("TTCONE_TOL")
        ->check(CLI::PositiveNumber);

    Dims dims;
    std::vector<Index> ranks;
    std::vector<Index> slack;
    std::uint64_t seed = 0;
    std::string out_base;
    std::string out_vec;
    CommonPaths paths;

    CLI::App* rnd = app.add_subcommand("random",
                                       "generate a left-orthogonal base and an in-cone vector");
    rnd->add_option("--dims", dims, "mode sizes n1,...,nd")->required()->delimiter(',');
    rnd->add_option("--ranks", ranks, "bond ranks k1,...,k_{d-1}")->required()->delimiter(',');
    rnd->add_option("--slack", slack, "slack bounds s1,...,s_{d-1}")->required()->delimiter(',');
    rnd->add_option("--seed", seed, "random seed")->required();
    rnd->add_option("--out-base", out_base, "output path for the base (TT JSON)")->required();
    rnd->add_option("--out-vec", out_vec, "output path for the vector (dense JSON)")->required();

    CLI::App* ext = app.add_subcommand("extract", "recover the block parametrization of a vector");
    ext->add_option("--base", paths.base, "base point (TT JSON)")->required();
    ext->add_option("--vec", paths.vec, "ambient vector (dense JSON)")->required();
    ext->add_option("--slack", slack, "slack bounds s1,...,s_{d-1}")->required()->delimiter(',');
    ext->add_option("--out", paths.out, "output path for the cone vector JSON")->required();

    CLI::App* eva = app.add_subcommand("eval", "evaluate a cone vector to a dense tensor");
    eva->add_option("--tcv", paths.tcv, "cone vector JSON")->required();
    eva->add_option("--out", paths.out, "output path for the dense JSON")->required();

    CLI::App* ret = app.add_subcommand("retract", "map a cone vector back onto the variety");
    ret->add_option("--tcv", paths.tcv, "cone vector JSON")->required();
    ret->add_option("--out", paths.out, "output path for the TT JSON")->required();

    CLI::App* chk = app.add_subcommand("check", "implicit membership test with spectra");
    chk->add_option("--base", paths.base, "base point (TT JSON)")->required();
    chk->add_option("--vec", paths.vec, "ambient vector (dense JSON)")->required();
    chk->add_option("--slack", slack, "slack bounds s1,...,s_{d-1}")->required()->delimiter(',');
    chk->add_option("--report", paths.report, "report path, '-' for stdout")->required();

    CLI::App* ver = app.add_subcommand("verify", "secant, retraction-order and invariant checks");
    ver->add_option("--tcv", paths.tcv, "cone vector JSON")->required();
    ver->add_option("--report", paths.report, "report path, '-' for stdout")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    Tolerance tol;
    tol.rank = tol_value;

    try {
        if (rnd->parsed()) return run_random(dims, ranks, slack, seed, out_base, out_vec, tol);
        if (ext->parsed()) return run_extract(paths, slack, tol);
        if (eva->parsed()) return run_eval(paths);
        if (ret->parsed()) return run_retract(paths);
        if (chk->parsed()) return run_check(paths, slack, tol);
        if (ver->parsed()) return run_verify(paths, tol);
    } catch (const NotInCone& e) {
        std::cerr << "not in cone: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
