#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reslab/config.hpp"
#include "reslab/errors.hpp"
#include "reslab/ladder.hpp"
#include "reslab/report.hpp"
#include "reslab/solve.hpp"
#include "reslab/spectrum.hpp"

namespace py = pybind11;
using namespace reslab;

namespace {

// Reports cross the boundary as JSON text; the Python side turns them into dicts.
std::string dump(const report::json& j) { return j.dump(); }

/// A configured experiment with its operator assembled once.
class Problem {
public:
    explicit Problem(const std::optional<std::string>& toml)
        : config_(toml ? cli::parse_config(*toml) : cli::default_config()),
          grid_(cli::make_grid(config_)),
          op_(op::assemble(grid_, cli::make_potential(config_))),
          nl_(cli::make_nonlinearity(config_)) {}

    std::string config_toml() const { return cli::serialize_config(config_); }
    std::string config_hash() const { return cli::config_hash(config_); }
    Eigen::VectorXd coordinates() const {
        Eigen::VectorXd x(grid_.dof());
        for (Eigen::Index i = 0; i < grid_.dof(); ++i) x[i] = grid_.coordinates(i)[0];
        return x;
    }

    py::tuple spectrum(int k) const {
        auto rep = op::lowest_eigenpairs(op_, k, cli::make_eigen_options(config_));
        return py::make_tuple(rep.eigenvalues, rep.eigenvectors);
    }

    Eigen::VectorXd seed(int j, double amplitude) const {
        const auto rep = op::lowest_eigenpairs(op_, j, cli::make_eigen_options(config_));
        return amplitude * rep.eigenvectors.col(j - 1);
    }

    Eigen::VectorXd residual(double lambda, const Eigen::VectorXd& u) const { return solve::residual(op_, nl_, lambda, u); }
    double energy(double lambda, const Eigen::VectorXd& u) const { return solve::energy(op_, nl_, lambda, u); }

    py::tuple solve(double lambda, const Eigen::VectorXd& seed) const {
        const auto st = solve::newton_solve(op_, nl_, lambda, seed, cli::make_caps(config_));
        return py::make_tuple(st.u, dump(report::to_json(st)));
    }

    std::string continue_branch(double from, double to, int steps, const Eigen::VectorXd& seed) const {
        return dump(report::to_json(solve::continue_branch(op_, nl_, from, to, steps, seed, cli::make_caps(config_))));
    }

    std::string probe(double lambda, int trials) const {
        return dump(report::to_json(solve::nonexistence_probe(op_, cli::make_probe_nonlinearity(config_), lambda, trials,
                                                              config_.solver.k, config_.seed, cli::make_caps(config_))));
    }

private:
    cli::ExperimentConfig config_;
    op::Grid grid_;
    op::DiscreteOperator op_;
    model::NonlinearitySpec nl_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "reslab native core";
    m.attr("__version__") = RESLAB_VERSION;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<LadderOverflow>(m, "LadderOverflow", base.ptr());
    py::register_exception<UnboundConstant>(m, "UnboundConstant", base.ptr());
    py::register_exception<AssemblyError>(m, "AssemblyError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<NearDegeneracyError>(m, "NearDegeneracyError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    m.def(
        "plan_ladder",
        [](int dim, const std::optional<std::string>& p) {
            const auto e = p ? ladder::LebesgueExponent::finite(ladder::parse_rational(*p))
                             : ladder::LebesgueExponent::infinity();
            return dump(report::to_json(ladder::plan_ladder(dim, e)));
        },
        py::arg("dim"), py::arg("p") = py::none());

    m.def(
        "check_example",
        [](double alpha) {
            const auto s = model::build_log_nonlinearity(alpha);
            return dump(report::to_json(*s.flags));
        },
        py::arg("alpha"));

    m.def("default_config", [] { return cli::serialize_config(cli::default_config()); });

    py::class_<Problem>(m, "Problem")
        .def(py::init<const std::optional<std::string>&>(), py::arg("config") = py::none())
        .def_property_readonly("config", &Problem::config_toml)
        .def_property_readonly("config_hash", &Problem::config_hash)
        .def("coordinates", &Problem::coordinates)
        .def("spectrum", &Problem::spectrum, py::arg("k"))
        .def("seed", &Problem::seed, py::arg("j"), py::arg("amplitude"))
        .def("residual", &Problem::residual, py::arg("lam"), py::arg("u"))
        .def("energy", &Problem::energy, py::arg("lam"), py::arg("u"))
        .def("solve", &Problem::solve, py::arg("lam"), py::arg("seed"))
        .def("continue_branch", &Problem::continue_branch, py::arg("start"), py::arg("end"), py::arg("steps"),
             py::arg("seed"))
        .def("probe", &Problem::probe, py::arg("lam"), py::arg("trials"));
}
