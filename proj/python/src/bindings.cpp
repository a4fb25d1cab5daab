#include "rsb/classical.hpp"
#include "rsb/coalgebra.hpp"
#include "rsb/enumerate.hpp"
#include "rsb/errors.hpp"
#include "rsb/grafting.hpp"
#include "rsb/model.hpp"
#include "rsb/spec.hpp"
#include "rsb/verify.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

namespace py = pybind11;
using namespace rsb;

namespace {

py::object fraction(const Q& q) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(to_string(q));
}

Q rational_of(const py::handle& v) { return parse_rational(py::str(v).cast<std::string>()); }

Tree tree_of(const EquationSpec& sp, const std::string& text) {
  Tree t = parse_tree(text, sp.dim());
  (void)degree(t, sp);  // rejects undeclared labels
  return t;
}

Forest forest_of(const EquationSpec& sp, const std::vector<std::string>& parts) {
  std::vector<Tree> ts;
  for (const auto& p : parts) ts.push_back(tree_of(sp, p));
  return Forest(ts);
}

py::tuple forest_tuple(const Forest& f) {
  py::tuple out(f.size());
  for (size_t i = 0; i < f.size(); ++i) out[i] = f.trees()[i].key();
  return out;
}

py::dict comb_dict(const Comb& c) {
  py::dict d;
  for (const auto& [t, v] : c) d[py::str(t.key())] = fraction(v);
  return d;
}

TreeChar character_of(const EquationSpec& sp, const py::dict& values) {
  TreeChar c;
  for (const auto& [k, v] : values) c[tree_of(sp, k.cast<std::string>())] = rational_of(v);
  return c;
}

Q cap_or_support(const EquationSpec& sp, const Tree& t, const std::optional<std::string>& cap) {
  return cap ? parse_rational(*cap) : support_cap({t}, sp);
}

struct PyModel {
  EquationSpec spec;
  std::unique_ptr<Model> model;

  py::array_t<double> grid(const Model::Field& f) const {
    const auto& c = model->config();
    py::array_t<double> a({c.nt, c.nx});
    std::copy(f.begin(), f.end(), a.mutable_data());
    return a;
  }
  GridPoint point(std::pair<int, int> p) const { return model->wrap(p.first, p.second); }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Decorated and plain rooted trees, their products and coproducts, and a grid model.";
  py::register_exception<Error>(m, "RsbError", PyExc_ValueError);

  py::class_<EquationSpec>(m, "Spec")
      .def_static("load", &load_spec, py::arg("path"))
      .def_static("from_json", &parse_spec, py::arg("text"))
      .def_property_readonly("dim", &EquationSpec::dim)
      .def_property_readonly("kernels", [](const EquationSpec& s) {
        py::dict d;
        for (const auto& [k, v] : s.kernels) d[py::str(k)] = fraction(v);
        return d;
      })
      .def_property_readonly("noises", [](const EquationSpec& s) {
        py::dict d;
        for (const auto& [k, v] : s.noises) d[py::str(k)] = fraction(v);
        return d;
      })
      .def("to_json", &spec_to_json);

  m.def("canonical", [](const EquationSpec& sp, const std::string& t) { return tree_of(sp, t).key(); },
        py::arg("spec"), py::arg("tree"));
  m.def("degree", [](const EquationSpec& sp, const std::string& t) { return fraction(degree(tree_of(sp, t), sp)); },
        py::arg("spec"), py::arg("tree"));
  m.def("symmetry", [](const EquationSpec& sp, const std::string& t) { return py::int_(py::str(to_string(tree_of(sp, t).symmetry()))); },
        py::arg("spec"), py::arg("tree"));
  m.def(
      "enumerate",
      [](const EquationSpec& sp, const std::string& space, std::optional<std::string> gamma, std::optional<int> edges) {
        Cutoff c = default_cutoff(sp);
        if (gamma) c.gamma = parse_rational(*gamma);
        if (edges) c.max_edges = *edges;
        if (space != "T" && space != "T+") throw SpecError("space must be 'T' or 'T+'");
        std::vector<std::string> out;
        for (const auto& t : enumerate_trees(sp, c, space == "T" ? Space::T : Space::TPlus)) out.push_back(t.key());
        return out;
      },
      py::arg("spec"), py::arg("space") = "T", py::arg("gamma") = py::none(), py::arg("max_edges") = py::none());

  m.def(
      "graft",
      [](const EquationSpec& sp, const std::string& left, const std::string& edge, const std::string& right) {
        const Edge a = tree_of(sp, "I[" + edge + "](1)").branches().front().edge;
        return comb_dict(deformed_graft(tree_of(sp, left), a, tree_of(sp, right)));
      },
      py::arg("spec"), py::arg("left"), py::arg("edge"), py::arg("right"));
  m.def(
      "star2",
      [](const EquationSpec& sp, const std::string& left, const std::string& right, bool plain) {
        return comb_dict(star2(tree_of(sp, left), tree_of(sp, right), plain ? RaiseWeights::Plain : RaiseWeights::Multinomial));
      },
      py::arg("spec"), py::arg("left"), py::arg("right"), py::arg("plain_weights") = false);
  m.def(
      "delta2",
      [](const EquationSpec& sp, const std::string& tree, std::optional<std::string> cap, bool hat) {
        const Tree t = tree_of(sp, tree);
        py::dict d;
        for (const auto& [lr, v] : delta2(t, sp.s, cap_or_support(sp, t, cap), hat))
          d[py::make_tuple(lr.first.key(), lr.second.key())] = fraction(v);
        return d;
      },
      py::arg("spec"), py::arg("tree"), py::arg("cap") = py::none(), py::arg("hat") = false);
  m.def(
      "delta1",
      [](const EquationSpec& sp, const std::string& tree, std::optional<std::string> cap) {
        const Tree t = tree_of(sp, tree);
        py::dict d;
        for (const auto& [fr, v] : delta1(t, sp.s, cap_or_support(sp, t, cap)))
          d[py::make_tuple(forest_tuple(fr.first), fr.second.key())] = fraction(v);
        return d;
      },
      py::arg("spec"), py::arg("tree"), py::arg("cap") = py::none());
  m.def(
      "star1",
      [](const EquationSpec& sp, const std::vector<std::string>& forest, const std::string& tree) {
        return comb_dict(star1(forest_of(sp, forest), tree_of(sp, tree)));
      },
      py::arg("spec"), py::arg("forest"), py::arg("tree"));
  m.def(
      "mstar",
      [](const EquationSpec& sp, const py::dict& beta, const std::string& tree, bool recursive) {
        const TreeChar b = character_of(sp, beta);
        const Tree t = tree_of(sp, tree);
        return comb_dict(recursive ? mstar_recursive(b, t) : mstar_star1(b, t));
      },
      py::arg("spec"), py::arg("beta"), py::arg("tree"), py::arg("recursive") = false);

  m.def(
      "classical_gamma",
      [](const std::string& t) { return py::int_(py::str(to_string(classical::gamma_density(classical::parse_plain_tree(t))))); },
      py::arg("tree"));

  m.def(
      "verify_report",
      [](const std::string& suite, std::uint64_t seed, const std::string& spec_dir) {
        VerifyContext c = default_context(spec_dir, seed);
        std::vector<SuiteResult> results;
        {
          py::gil_scoped_release release;
          for (const auto& s : all_suites())
            if (suite == "all" || s.id == suite) results.push_back(s.run(c));
        }
        if (results.empty()) throw SpecError("unknown suite '" + suite + "'");
        return report_json(c, results, false);
      },
      py::arg("suite"), py::arg("seed"), py::arg("spec_dir"));

  py::class_<PyModel>(m, "Model")
      .def(py::init([](const EquationSpec& sp, int nt, int nx, std::uint64_t seed) {
             ModelConfig cfg;
             cfg.nt = nt;
             cfg.nx = nx;
             cfg.seed = seed;
             auto pm = std::make_unique<PyModel>();
             pm->spec = sp;
             pm->model = std::make_unique<Model>(sp, cfg);
             return pm;
           }),
           py::arg("spec"), py::arg("nt") = 256, py::arg("nx") = 256, py::arg("seed") = 1)
      .def_property_readonly("spacing", [](const PyModel& p) { return py::make_tuple(p.model->t_of(1), p.model->x_of(1)); })
      .def("noise", [](const PyModel& p, const std::string& l) { return p.grid(p.model->noise(l)); }, py::arg("label"))
      .def(
          "set_noise",
          [](PyModel& p, const std::string& l, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
            p.model->set_noise(l, Model::Field(a.data(), a.data() + a.size()));
          },
          py::arg("label"), py::arg("values"))
      .def("pi", [](PyModel& p, const std::string& t) { return p.grid(p.model->pi(tree_of(p.spec, t))); }, py::arg("tree"))
      .def(
          "pi_recentred",
          [](PyModel& p, std::pair<int, int> z, const std::string& t) {
            return p.grid(p.model->pi_recentred(p.point(z), tree_of(p.spec, t)));
          },
          py::arg("z"), py::arg("tree"))
      .def(
          "check_factorisation",
          [](PyModel& p, std::pair<int, int> z, const std::string& t, const std::vector<std::pair<int, int>>& points,
             bool plus_sign) {
            std::vector<GridPoint> pts;
            for (const auto& q : points) pts.push_back(p.point(q));
            const auto r = p.model->check_factorisation(p.point(z), tree_of(p.spec, t), pts,
                                                        plus_sign ? FzSign::Plus : FzSign::Minus);
            py::dict d;
            d["max_abs_error"] = r.max_abs_error;
            d["max_abs_value"] = r.max_abs_value;
            d["samples"] = r.samples;
            d["terms"] = r.terms;
            return d;
          },
          py::arg("z"), py::arg("tree"), py::arg("points"), py::arg("plus_sign") = false)
      .def(
          "decay_exponent",
          [](PyModel& p, std::pair<int, int> z, const std::string& t, const std::vector<int>& scales) {
            return p.model->estimate_decay_exponent(p.point(z), tree_of(p.spec, t), scales);
          },
          py::arg("z"), py::arg("tree"), py::arg("scales") = std::vector<int>{16, 8, 4, 2});
}
