#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "ornithopter/config.hpp"
#include "ornithopter/io.hpp"
#include "ornithopter/optimization.hpp"
#include "ornithopter/reduced_dynamics.hpp"
#include "ornithopter/validation.hpp"

namespace py = pybind11;
using namespace ornithopter;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Flapping-wing multibody dynamics";
  m.attr("__version__") = kVersion;

  m.def("hat", &hat, py::arg("v"));
  m.def("exp_so3", [](const Vec3& v) { return exp_so3(v).matrix(); }, py::arg("rotation_vector"));

  py::class_<Morphology>(m, "Morphology")
      .def_readwrite("body_mass", &Morphology::body_mass)
      .def_readwrite("body_inertia", &Morphology::body_inertia)
      .def_readwrite("gravity", &Morphology::gravity)
      .def_property_readonly("total_mass", &Morphology::total_mass)
      .def_property_readonly("wing_masses", [](const Morphology& mo) {
        std::vector<double> out;
        for (const auto& w : mo.wings) out.push_back(w.mass);
        return out;
      });
  m.def("default_dragonfly",
        [](const std::string& mode) { return default_dragonfly(parse_inertia_mode(mode)); },
        py::arg("inertia_mode") = "rescaled");

  py::class_<AeroModel>(m, "AeroModel")
      .def(py::init<>())
      .def_readwrite("rho", &AeroModel::rho)
      .def_readwrite("stations", &AeroModel::stations);

  py::class_<Vehicle>(m, "Vehicle")
      .def(py::init<Morphology, AeroModel>(), py::arg("morphology"), py::arg("aero"))
      .def_property_readonly("morphology", &Vehicle::morphology)
      .def_property_readonly("aero", &Vehicle::aero);

  py::class_<KinematicsParams>(m, "KinematicsParams")
      .def_property_readonly("frequency", &KinematicsParams::frequency);
  py::class_<BodyPitch>(m, "BodyPitch")
      .def_readwrite("amplitude", &BodyPitch::amplitude)
      .def_readwrite("phase", &BodyPitch::phase)
      .def_readwrite("offset", &BodyPitch::offset);
  m.def("dragonfly_hover_kinematics", &dragonfly_hover_kinematics);
  m.def("dragonfly_hover_pitch", &dragonfly_hover_pitch);

  py::class_<BodyState>(m, "BodyState")
      .def(py::init<>())
      .def_readwrite("t", &BodyState::t)
      .def_readwrite("position", &BodyState::position)
      .def_readwrite("velocity", &BodyState::velocity)
      .def_readwrite("body_rate", &BodyState::body_rate)
      .def_property(
          "attitude", [](const BodyState& b) { return b.attitude.matrix(); },
          [](BodyState& b, const Mat3& a) { b.attitude = Rotation::from_matrix(a); });

  py::class_<ForceDecomposition>(m, "ForceDecomposition")
      .def_readonly("f_c", &ForceDecomposition::f_c)
      .def_readonly("f_b", &ForceDecomposition::f_b)
      .def_readonly("f_w", &ForceDecomposition::f_w)
      .def_readonly("gamma_c", &ForceDecomposition::gamma_c)
      .def_readonly("gamma_b", &ForceDecomposition::gamma_b)
      .def_readonly("gamma_w", &ForceDecomposition::gamma_w);

  m.def("step_reduced", &step_reduced, py::arg("vehicle"), py::arg("body"), py::arg("kinematics"),
        py::arg("dt"));
  m.def(
      "simulate_reduced",
      [](const Vehicle& v, BodyState body, const KinematicsParams& k, double dt, int steps) {
        Eigen::MatrixXd out(steps + 1, 3);
        out.row(0) = body.position.transpose();
        for (int n = 1; n <= steps; ++n) {
          body = step_reduced(v, body, k, dt);
          out.row(n) = body.position.transpose();
        }
        return py::make_tuple(body, out);
      },
      py::arg("vehicle"), py::arg("body"), py::arg("kinematics"), py::arg("dt"), py::arg("steps"),
      "Integrates the reduced model; returns (final state, positions of shape (steps + 1, 3)).");
  m.def(
      "decompose_forces",
      [](const Vehicle& v, const BodyState& b, const KinematicsParams& k) {
        Vec6 accel;
        const ForceDecomposition d = decompose_forces(v, b, k, &accel);
        return py::make_tuple(d, accel);
      },
      py::arg("vehicle"), py::arg("body"), py::arg("kinematics"));
  m.def(
      "closure_residual",
      [](const Morphology& mo, const BodyState& b, const ForceDecomposition& d, const Vec6& a) {
        const ClosureResidual r = closure_residual(mo, b, d, a);
        return py::make_tuple(r.translational, r.rotational);
      },
      py::arg("morphology"), py::arg("body"), py::arg("forces"), py::arg("body_accel"));

  m.def(
      "mass_matrix",
      [](const Morphology& mo, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        const SystemState s = random_state(rng);
        py::dict d;
        d["C"] = Eigen::MatrixXd(assemble_C(s, mo));
        d["xi"] = Eigen::VectorXd(s.xi());
        d["kinetic_energy_bodies"] = kinetic_energy_bodies(s, mo);
        return d;
      },
      py::arg("morphology"), py::arg("seed"),
      "Mass matrix, velocity and body-by-body kinetic energy at a random state.");
  m.def("random_state_xi", [](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return Eigen::VectorXd(random_state(rng).xi());
  });

  m.def(
      "wing_loads_at",
      [](const Vehicle& v, const KinematicsParams& k, double t) {
        BodyState body;
        body.t = t;
        body.position = Vec3(0.0, 0.0, 2.0);
        const WingWrenches w = v.wing_loads(compose_state(body, sample_wings(k, t)));
        std::vector<std::pair<Vec3, Vec3>> out;
        for (const auto& x : w) out.emplace_back(x.force(), x.moment);
        return out;
      },
      py::arg("vehicle"), py::arg("kinematics"), py::arg("t"),
      "(force, moment) per wing for the body at rest at p = (0, 0, 2).");

  m.def(
      "evaluate_hover",
      [](const KinematicsParams& k, const BodyPitch& p, const Vehicle& v, double periods,
         double dt) {
        GAConfig cfg;
        cfg.horizon_periods = periods;
        cfg.dt = dt;
        const HoverCost h = evaluate_hover(k, p, v, cfg);
        py::dict d;
        d["cost"] = h.cost;
        d["position_term"] = h.position_term;
        d["velocity_term"] = h.velocity_term;
        d["max_excursion"] = h.max_excursion;
        d["diverged"] = h.diverged;
        return d;
      },
      py::arg("kinematics"), py::arg("pitch"), py::arg("vehicle"), py::arg("periods") = 10.0,
      py::arg("dt") = 1e-5);

  py::class_<RunConfig>(m, "RunConfig")
      .def_readonly("morphology", &RunConfig::morphology)
      .def_readonly("aero", &RunConfig::aero)
      .def_readonly("kinematics", &RunConfig::kinematics)
      .def_readonly("body_pitch", &RunConfig::body_pitch)
      .def_readonly("seed", &RunConfig::seed);
  m.def("load_config", [](const std::string& path) { return load_config(path).config; },
        py::arg("path"));

  m.def(
      "run_validation",
      [](const RunConfig& c, bool quick) {
        ValidationOptions opt = quick ? ValidationOptions::quick() : ValidationOptions{};
        opt.seed = c.seed;
        const ValidationReport r = [&] {
          py::gil_scoped_release release;
          return run_all(c, opt);
        }();
        py::list checks;
        for (const auto& x : r.checks) {
          py::dict d;
          d["id"] = x.id;
          d["status"] = to_string(x.status);
          d["gating"] = x.gating;
          d["measured"] = x.measured;
          d["threshold"] = x.threshold;
          d["detail"] = x.detail;
          checks.append(d);
        }
        return py::make_tuple(r.passed(), checks);
      },
      py::arg("config"), py::arg("quick") = true);
}
