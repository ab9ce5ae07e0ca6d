#include "reslab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "reslab/errors.hpp"

namespace reslab::report {

namespace {

json integer(const boost::multiprecision::cpp_int& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        return v.convert_to<std::int64_t>();
    return v.str();
}

json rational(const ladder::Rational& r) {
    return json::array({integer(boost::multiprecision::numerator(r)), integer(boost::multiprecision::denominator(r))});
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(finite_or_null(v[i]));
    return a;
}

json verdict(const model::HypothesisVerdict& v) {
    return {{"checked", v.checked}, {"passed", v.passed}, {"witness", v.witness}, {"margin", finite_or_null(v.margin)}};
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json to_json(const ladder::ExponentLadder& l) {
    json ex = json::array();
    for (const auto& q : l.exponents) ex.push_back(rational(q));
    json chain = json::array();
    for (const auto& f : l.chain.factors) {
        json args = json::array();
        for (const auto& a : f.args) args.push_back(rational(a));
        chain.push_back({{"kind", std::string(ladder::to_string(f.kind))},
                         {"args", args},
                         {"value", f.value ? json(*f.value) : json(nullptr)}});
    }
    return {{"dim", l.dim},
            {"p", l.p.is_infinite() ? json("inf") : rational(l.p.value())},
            {"case", std::string(ladder::to_string(l.ladder_case))},
            {"exponents", ex},
            {"j0", l.j0 ? json(*l.j0) : json("trivial")},
            {"tail", l.tail ? rational(*l.tail) : json(nullptr)},
            {"terminal", std::string(ladder::to_string(l.terminal))},
            {"chain", chain}};
}

std::string to_table(const ladder::ExponentLadder& l) {
    std::ostringstream os;
    os << "N = " << l.dim << ", p = " << (l.p.is_infinite() ? std::string("inf (V1 = 0)") : ladder::to_string(l.p.value()))
       << ", case " << ladder::to_string(l.ladder_case) << "\n";
    os << "  i  exponent\n";
    for (std::size_t i = 0; i < l.exponents.size(); ++i)
        os << "  " << i << "  " << ladder::to_string(l.exponents[i]) << "\n";
    os << "j0       " << (l.j0 ? std::to_string(*l.j0) : std::string("trivial")) << "\n";
    os << "tail     " << (l.tail ? ladder::to_string(*l.tail) : std::string("-")) << "\n";
    os << "terminal " << ladder::to_string(l.terminal) << "\n";
    os << "chain    " << l.chain.size() << " factors:";
    for (const auto& f : l.chain.factors) os << ' ' << f.key();
    os << "\n";
    return os.str();
}

json to_json(const model::HypothesisReport& r) {
    json g = json::object();
    for (int id = 1; id <= 8; ++id) {
        if (id == 6) continue;
        g["g" + std::to_string(id)] = verdict(r[id]);
    }
    return {{"hypotheses", g},
            {"failed", r.failed()},
            {"samples", r.samples},
            {"thresholds",
             {{"large", r.thresholds.large},
              {"small", r.thresholds.small},
              {"ratio_tol", r.thresholds.ratio_tol},
              {"zero_band", r.thresholds.zero_band}}}};
}

json to_json(const op::SpectrumReport& r) {
    json trusted = json::array();
    for (Eigen::Index j = 0; j < r.size(); ++j) trusted.push_back(r.trusted(j));
    return {{"eigenvalues", vector_json(r.eigenvalues)},
            {"residual_norms", vector_json(r.residual_norms)},
            {"cluster", r.cluster},
            {"trusted", trusted},
            {"sigma_ess_marker", r.sigma_ess_marker ? json(*r.sigma_ess_marker) : json(nullptr)},
            {"truncation_margin", r.truncation_margin},
            {"used_dense", r.used_dense},
            {"iterations", r.iterations}};
}

json to_json(const op::MinMaxRecord& r) {
    json levels = json::array();
    for (const auto& l : r.levels)
        levels.push_back({{"j", l.j},
                          {"mu", l.mu},
                          {"span_max", l.span_max},
                          {"attained", l.attained},
                          {"worst_subspace_min", finite_or_null(l.worst_subspace_min)},
                          {"upper_bound_holds", l.upper_bound_holds}});
    return {{"levels", levels},
            {"global_min_sample", finite_or_null(r.global_min_sample)},
            {"global_lower_bound", r.global_lower_bound},
            {"tolerance", r.tolerance},
            {"passed", r.passed()}};
}

json to_json(const op::ComparisonRecord& r) {
    return {{"mu_lower", vector_json(r.mu_lower)},
            {"mu_upper", vector_json(r.mu_upper)},
            {"strict", r.strict},
            {"violated", r.violated},
            {"ordered", r.ordered()},
            {"all_strict", r.all_strict()},
            {"tolerance", r.tolerance}};
}

json to_json(const solve::SolutionState& s) {
    return {{"lambda", s.lambda},         {"residual", s.residual}, {"energy", s.energy},
            {"linf", s.linf},             {"l2", s.l2},             {"morse_m", s.morse_m},
            {"morse_M", s.morse_M},       {"margin", finite_or_null(s.margin)},
            {"iterations", s.iterations}, {"converged", s.converged}};
}

json to_json(const solve::ContinuationBranch& b) {
    json states = json::array();
    for (const auto& s : b.states) states.push_back(to_json(s));
    return {{"outcome", std::string(solve::to_string(b.outcome))},
            {"failed_lambda", b.failed_lambda ? json(*b.failed_lambda) : json(nullptr)},
            {"sup_linf", b.sup_linf},
            {"max_jump", b.max_jump},
            {"bisections", b.bisections},
            {"schedule", b.schedule},
            {"states", states}};
}

json to_json(const solve::ProbeRecord& r) {
    json witnesses = json::array();
    for (const auto& s : r.counter_witnesses) witnesses.push_back(to_json(s));
    return {{"k", r.k},
            {"mu_k", r.mu_k},
            {"lambda", r.lambda},
            {"strict_ratio_premise", r.strict_ratio_premise},
            {"gap_premise", r.gap_premise},
            {"trials", r.trials},
            {"converged", r.converged},
            {"failed", r.failed},
            {"largest_converged_l2", r.largest_converged_l2},
            {"consistent_with_nonexistence", r.consistent_with_nonexistence()},
            {"counter_witnesses", witnesses}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
    close_checked(out, path);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    close_checked(out, path);
}

void emit_plot_data(const solve::ContinuationBranch& branch, const std::filesystem::path& path) {
    if (branch.states.empty()) throw DomainError("cannot emit plot data for an empty branch");
    std::string text = "lambda,energy,linf,l2,morse_m,margin\n";
    for (const auto& s : branch.states) {
        text += format_double(s.lambda) + ',' + format_double(s.energy) + ',' + format_double(s.linf) + ',' +
                format_double(s.l2) + ',' + std::to_string(s.morse_m) + ',' + format_double(s.margin) + '\n';
    }
    write_text(path, text);
}

void write_vectors_csv(const std::filesystem::path& path, const op::Grid& grid, const Eigen::MatrixXd& vectors) {
    static const char* axes[] = {"x", "y", "z"};
    std::string text;
    for (int a = 0; a < grid.dim(); ++a) text += std::string(a ? "," : "") + axes[a];
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) text += ",v" + std::to_string(c + 1);
    text += '\n';
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
        const auto x = grid.coordinates(i);
        for (int a = 0; a < grid.dim(); ++a) text += (a ? "," : "") + format_double(x[static_cast<std::size_t>(a)]);
        for (Eigen::Index c = 0; c < vectors.cols(); ++c) text += ',' + format_double(vectors(i, c));
        text += '\n';
    }
    write_text(path, text);
}

}  // namespace reslab::report
