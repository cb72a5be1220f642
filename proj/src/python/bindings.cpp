#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "wrsn/baselines.hpp"
#include "wrsn/dqn.hpp"
#include "wrsn/experiment.hpp"

namespace py = pybind11;
using namespace wrsn;

namespace {

std::string instance_text(const ProblemInstance& inst) {
    std::ostringstream os;
    write_instance(os, inst);
    return os.str();
}

ProblemInstance instance_from_text(const std::string& text) {
    std::istringstream is(text);
    return read_instance(is);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Charger scheduling for rechargeable sensor networks";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<InfeasibleDeployment>(m, "InfeasibleDeployment", base.ptr());
    py::register_exception<ResourceLimit>(m, "ResourceLimit", base.ptr());
    py::register_exception<Divergence>(m, "Divergence", base.ptr());

    py::enum_<Variant>(m, "Variant")
        .value("P1", Variant::P1_MobilePath)
        .value("P2", Variant::P2_FullyChargingReward)
        .value("P3", Variant::P3_KCoverage);
    m.def("parse_variant", [](const std::string& s) { return parse_variant(s); });

    py::class_<Point>(m, "Point")
        .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
        .def_readwrite("x", &Point::x)
        .def_readwrite("y", &Point::y);

    py::class_<SensorNode>(m, "SensorNode")
        .def_readonly("id", &SensorNode::id)
        .def_readonly("position", &SensorNode::position)
        .def_readonly("capacity", &SensorNode::capacity)
        .def_readonly("residual", &SensorNode::residual)
        .def_readonly("consumption", &SensorNode::consumption)
        .def_readonly("deadline", &SensorNode::deadline)
        .def_readonly("prize", &SensorNode::prize);

    py::class_<GenParams>(m, "GenParams")
        .def_static("defaults", &GenParams::defaults)
        .def_readwrite("area_side", &GenParams::area_side)
        .def_readwrite("energy_capacity", &GenParams::energy_capacity)
        .def_readwrite("timespan", &GenParams::timespan)
        .def_readwrite("alpha", &GenParams::alpha)
        .def_readwrite("coverage_k", &GenParams::coverage_k)
        .def_readwrite("meet_dt", &GenParams::meet_dt);

    py::class_<ProblemInstance>(m, "ProblemInstance")
        .def_readonly("variant", &ProblemInstance::variant)
        .def_readonly("nodes", &ProblemInstance::nodes)
        .def_readonly("seed", &ProblemInstance::seed)
        .def("requesters", &ProblemInstance::requesters)
        .def("to_text", &instance_text)
        .def_static("from_text", &instance_from_text)
        .def("__len__", &ProblemInstance::size);

    m.def("generate_instance", &generate_instance, py::arg("variant"), py::arg("n"), py::arg("params"),
          py::arg("seed"));

    py::class_<ScheduleState>(m, "ScheduleState")
        .def("order", &ScheduleState::order)
        .def_readonly("feasible", &ScheduleState::feasible)
        .def_readonly("charge_energy", &ScheduleState::charge_energy)
        .def("tour_distance", &ScheduleState::tour_distance);

    py::class_<StepOutcome>(m, "StepOutcome")
        .def_readonly("next_state", &StepOutcome::next_state)
        .def_readonly("reward", &StepOutcome::reward)
        .def_readonly("terminal", &StepOutcome::terminal)
        .def_readonly("rejected", &StepOutcome::rejected);

    py::class_<Environment>(m, "Environment")
        .def(py::init([](const ProblemInstance& inst) { return Environment(inst); }))
        .def("initial_state", &Environment::initial_state)
        .def("actions", &Environment::actions)
        .def("step", &Environment::step)
        .def("objective", &Environment::objective)
        .def("replay", [](const Environment& e, const std::vector<int>& order) { return e.replay(order); })
        .def("vertex_count", &Environment::vertex_count);

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("solver", &SolveResult::solver)
        .def_readonly("feasible", &SolveResult::feasible)
        .def_readonly("objective", &SolveResult::objective)
        .def_readonly("distance", &SolveResult::distance)
        .def_readonly("energy", &SolveResult::energy)
        .def_property_readonly("order", [](const SolveResult& r) { return r.state.order(); });

    py::class_<EmbeddingParams>(m, "EmbeddingParams")
        .def_readonly("p", &EmbeddingParams::p)
        .def_readonly("rounds", &EmbeddingParams::rounds)
        .def("save", [](const EmbeddingParams& p, const std::filesystem::path& path) { save_params(path, p); })
        .def_static("load", &load_params);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def_static("defaults", &TrainConfig::defaults)
        .def_readwrite("episodes", &TrainConfig::episodes)
        .def_readwrite("embed_dim", &TrainConfig::embed_dim)
        .def_readwrite("rounds", &TrainConfig::rounds)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("warmup", &TrainConfig::warmup)
        .def_readwrite("n_step", &TrainConfig::n_step)
        .def_readwrite("seed", &TrainConfig::seed);

    m.def("train", [](const std::vector<ProblemInstance>& insts, const TrainConfig& cfg) {
        py::gil_scoped_release release;
        return train(insts, cfg).params;
    });

    m.def(
        "solve",
        [](const std::string& solver, const ProblemInstance& inst, std::uint64_t seed, const EmbeddingParams* params,
           double dt) {
            SolverSettings s;
            s.dqn = params;
            s.dt = dt;
            py::gil_scoped_release release;
            return run_solver(solver, inst, s, seed);
        },
        py::arg("solver"), py::arg("instance"), py::arg("seed") = 1, py::arg("params") = nullptr,
        py::arg("dt") = 1.0);
}
