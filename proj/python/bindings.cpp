#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "yns/app.hpp"
#include "yns/error.hpp"
#include "yns/experiments.hpp"
#include "yns/lp_besov.hpp"
#include "yns/spectral.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace yns;

namespace {

using array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PhysicalParams make_params(double rho_bar, double mu, double mu_prime, double gamma,
                           const py::dict& pressure) {
    PhysicalParams p;
    p.rho_bar = rho_bar;
    p.mu = mu;
    p.mu_prime = mu_prime;
    p.gamma = gamma;
    const std::string law = pressure.contains("law") ? py::cast<std::string>(pressure["law"]) : "gamma";
    if (law == "slope")
        p.pressure = DirectSlope{py::cast<double>(pressure["p_prime"])};
    else if (law == "gamma")
        p.pressure = GammaLaw{pressure.contains("A") ? py::cast<double>(pressure["A"]) : 1.0,
                              pressure.contains("g") ? py::cast<double>(pressure["g"]) : 1.4};
    else
        throw ValidationError("pressure law must be \"gamma\" or \"slope\"");
    return p;
}

// Flat field of grid.total() values from an array shaped (n,)*dim.
RealField field_from(const array& a, const GridSpec& g) {
    if (static_cast<std::size_t>(a.size()) != g.total() || a.ndim() != g.dim)
        throw ValidationError("field shape does not match the grid");
    return RealField(a.data(), a.data() + a.size());
}

py::dict besov_dict(const BesovReport& r) {
    py::list blocks;
    for (const auto& b : r.blocks) blocks.append(py::dict("j"_a = b.j, "lp"_a = b.lp, "weighted"_a = b.weighted));
    return py::dict("s"_a = r.s, "p"_a = r.p, "r"_a = r.r, "j0"_a = r.j0, "total"_a = r.total,
                    "low"_a = r.low, "high"_a = r.high, "blocks"_a = blocks);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral lab for the compressible Navier-Stokes equations with a Yukawa potential";
    m.attr("__version__") = kCodeVersion;

    static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            base((e.kind() + ": " + e.what()).c_str());
        }
    });

    py::class_<Coefficients>(m, "Coefficients")
        .def_readonly("alpha1", &Coefficients::alpha1)
        .def_readonly("alpha2", &Coefficients::alpha2)
        .def_readonly("alpha3", &Coefficients::alpha3)
        .def_readonly("alpha4", &Coefficients::alpha4)
        .def_readonly("eta", &Coefficients::eta)
        .def_readonly("gamma", &Coefficients::gamma)
        .def_readonly("rho_bar", &Coefficients::rho_bar)
        .def_readonly("stability_margin", &Coefficients::stability_margin)
        .def_property_readonly("regime", [](const Coefficients& c) { return to_string(classify_regime(c)); })
        .def("__repr__", [](const Coefficients& c) {
            return "<Coefficients eta=" + std::to_string(c.eta) + " margin=" +
                   std::to_string(c.stability_margin) + ">";
        });

    m.def("coefficients",
          [](double rho_bar, double mu, double mu_prime, double gamma, const py::dict& pressure) {
              return derive_coefficients(make_params(rho_bar, mu, mu_prime, gamma, pressure));
          },
          "rho_bar"_a = 1.0, "mu"_a = 1.0, "mu_prime"_a = 0.0, "gamma"_a = 0.0,
          "pressure"_a = py::dict("law"_a = "slope", "p_prime"_a = 1.0));

    m.def("analyze_mode", [](double k, const Coefficients& c) {
        const ModeAnalysis a = analyze_mode(k, c);
        return py::dict("k"_a = a.k, "lambda_plus"_a = a.lambda_plus, "lambda_minus"_a = a.lambda_minus,
                        "discriminant"_a = a.discriminant, "branch"_a = to_string(a.branch));
    }, "k"_a, "coeffs"_a);

    m.def("propagator", [](double k, double t, const Coefficients& c) {
        const Propagator2x2 p = propagator(k, t, c);
        array out({2, 2});
        auto v = out.mutable_unchecked<2>();
        v(0, 0) = p.m_rr;
        v(0, 1) = p.m_rv;
        v(1, 0) = p.m_vr;
        v(1, 1) = p.m_vv;
        return out;
    }, "k"_a, "t"_a, "coeffs"_a);

    m.def("max_growth", [](const Coefficients& c) {
        const GrowthSummary s = max_growth(c);
        return py::dict("theta"_a = s.theta, "k0"_a = s.k0, "has_band"_a = s.has_band,
                        "band"_a = py::make_tuple(s.band_lo, s.band_hi), "regime"_a = to_string(s.regime));
    }, "coeffs"_a);

    m.def("lp_chi", &lp_chi, "r"_a);
    m.def("lp_phi", &lp_phi, "r"_a);

    m.def("besov_norm",
          [](const array& f, double length, double s, double p, double r, int j0) {
              GridSpec g{static_cast<int>(f.ndim()), static_cast<int>(f.shape(0)), length};
              g.validate();
              SpectralGrid sg(g);
              return besov_dict(besov_norm(sg, build_filter_bank(g), field_from(f, g), s, p, r, j0));
          },
          "field"_a, "length"_a, "s"_a, "p"_a = 2.0, "r"_a = 1.0, "j0"_a = 0);

    m.def("decay_exponent",
          [](const Coefficients& c, int dim, double p, double sigma, double sigma1, bool heat_surrogate,
             int threads) {
              DecaySpec spec;
              spec.dim = dim;
              spec.p = p;
              spec.sigma = sigma;
              spec.sigma1 = sigma1;
              spec.heat_surrogate = heat_surrogate;
              const DecaySeries d = linear_decay_quadrature(c, spec, threads);
              return py::dict("slope"_a = d.fit.slope, "half_width"_a = d.fit.slope_half_width,
                              "predicted"_a = d.predicted, "t"_a = d.t, "norm"_a = d.norm);
          },
          "coeffs"_a, "dim"_a = 3, "p"_a = 2.0, "sigma"_a = 1.5, "sigma1"_a = 0.0,
          "heat_surrogate"_a = false, "threads"_a = 1);

    m.def("run_document",
          [](const std::string& text, const std::string& subcommand, const std::string& out, int threads) {
              DispatchOptions opts;
              opts.out = out;
              opts.threads = threads;
              py::gil_scoped_release release;
              return run_document(text, subcommand, opts);
          },
          "config"_a, "subcommand"_a = "", "out"_a = "", "threads"_a = 1,
          "Run a JSON config document; returns the CLI exit code.");
}
