#pragma once

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptscat/errors.hpp"
#include "ptscat/hadamard.hpp"
#include "ptscat/kernel.hpp"
#include "ptscat/perturbation.hpp"
#include "ptscat/pt_exact.hpp"
#include "ptscat/scattering_data.hpp"

namespace ptscat {

using json = nlohmann::json;

// All floats in CSV output carry 17 significant digits (round-trip exact).
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---- KernelGrid <-> JSON (cache format) ------------------------------------

inline json kernel_to_json(const KernelGrid& K) {
    return json{{"side", K.side == Side::plus ? "plus" : "minus"},
                {"lambda", K.lambda},
                {"alpha", K.alpha},
                {"beta", K.beta},
                {"n", K.n},
                {"h", K.h},
                {"iterations", K.iterations},
                {"residual", K.residual},
                {"values", K.values},
                {"du", K.du},
                {"dv", K.dv}};
}

inline KernelGrid kernel_from_json(const json& j) {
    KernelGrid K;
    K.side = j.at("side").get<std::string>() == "plus" ? Side::plus : Side::minus;
    K.lambda = j.at("lambda").get<double>();
    K.alpha = j.at("alpha").get<double>();
    K.beta = j.at("beta").get<double>();
    K.n = j.at("n").get<int>();
    K.h = j.at("h").get<double>();
    K.iterations = j.at("iterations").get<int>();
    K.residual = j.at("residual").get<double>();
    K.values = j.at("values").get<std::vector<double>>();
    K.du = j.at("du").get<std::vector<double>>();
    K.dv = j.at("dv").get<std::vector<double>>();
    std::size_t expect = std::size_t(K.n + 1) * std::size_t(K.n + 1);
    if (K.n > 0 && (K.values.size() != expect || K.du.size() != expect || K.dv.size() != expect))
        throw config_error("kernel cache: value array size does not match grid metadata");
    return K;
}

// ---- zero lists -------------------------------------------------------------

inline const char* kind_name(ZeroKind k) {
    switch (k) {
        case ZeroKind::eigenvalue: return "eigenvalue";
        case ZeroKind::resonance: return "resonance";
        default: return "half_bound";
    }
}

inline json zeros_to_json(const std::vector<ZeroRecord>& zs) {
    json arr = json::array();
    for (const auto& r : zs)
        arr.push_back({{"re", r.location.real()},
                       {"im", r.location.imag()},
                       {"multiplicity", r.multiplicity},
                       {"kind", kind_name(r.kind)},
                       {"residual", r.residual}});
    return arr;
}

inline std::string zeros_to_csv(const std::vector<ZeroRecord>& zs) {
    std::ostringstream out;
    out << "re,im,multiplicity,kind,residual\n";
    for (const auto& r : zs)
        out << fmt17(r.location.real()) << ',' << fmt17(r.location.imag()) << ','
            << r.multiplicity << ',' << kind_name(r.kind) << ',' << fmt17(r.residual) << '\n';
    return out.str();
}

// ---- scattering batches ------------------------------------------------------

inline std::string scattering_csv_header() {
    return "re_z,im_z,re_T,im_T,re_Rplus,im_Rplus,re_Rminus,im_Rminus,"
           "re_W,im_W,re_Splus,im_Splus,re_Sminus,im_Sminus,unitarity_residual\n";
}

inline void append_scattering_csv(std::ostringstream& out, complex z, const ScatteringData& sd) {
    double unit = std::numeric_limits<double>::quiet_NaN();
    if (std::abs(z.imag()) < 1e-14)
        unit = std::norm(sd.T) + std::norm(sd.R_minus) - 1.0;
    out << fmt17(z.real()) << ',' << fmt17(z.imag()) << ',' << fmt17(sd.T.real()) << ','
        << fmt17(sd.T.imag()) << ',' << fmt17(sd.R_plus.real()) << ',' << fmt17(sd.R_plus.imag())
        << ',' << fmt17(sd.R_minus.real()) << ',' << fmt17(sd.R_minus.imag()) << ','
        << fmt17(sd.W.real()) << ',' << fmt17(sd.W.imag()) << ',' << fmt17(sd.S_plus.real())
        << ',' << fmt17(sd.S_plus.imag()) << ',' << fmt17(sd.S_minus.real()) << ','
        << fmt17(sd.S_minus.imag()) << ',' << fmt17(unit) << '\n';
}

// ---- Hadamard models ---------------------------------------------------------

inline json hadamard_to_json(const HadamardModel& m) {
    const char* target = m.target == HadamardTarget::W
                             ? "W"
                             : (m.target == HadamardTarget::S_plus ? "S_plus" : "S_minus");
    return json{{"target", target},
                {"m_or_l", m.m_or_l},
                {"a0_re", m.a0_or_b0.real()},
                {"a0_im", m.a0_or_b0.imag()},
                {"a1_re", m.a1_or_b1.real()},
                {"a1_im", m.a1_or_b1.imag()},
                {"truncation_N", m.truncation_N},
                {"fit_residual", m.fit_residual},
                {"zeros", zeros_to_json(m.zeros)}};
}

// ---- PerturbationSpec <-> JSON config ---------------------------------------

inline PerturbationSpec perturbation_from_json(const json& j) {
    if (j.is_null()) return PerturbationSpec{};
    std::vector<double> bps = j.at("breakpoints").get<std::vector<double>>();
    std::vector<std::vector<double>> coeffs =
        j.at("coefficients").get<std::vector<std::vector<double>>>();
    return PerturbationSpec(bps, coeffs);
}

inline json perturbation_to_json(const PerturbationSpec& q) {
    return json{{"breakpoints", q.breakpoints}, {"coefficients", q.coefficients}};
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot open output file: " + path);
    f << content;
}

} // namespace ptscat
