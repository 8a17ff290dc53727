// Deterministic text serialization of domain objects: CSV for plotting
// (12 significant digits), JSON for replay and reporting (17 significant
// digits).  No timestamps, no locale dependence, stable column and key
// order, so identical inputs serialize byte-identically.

#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "certify.hpp"
#include "integrate.hpp"
#include "profile.hpp"
#include "shoot.hpp"

namespace deadcore::io {

/// Fixed-precision %g rendering; non-finite values as inf/-inf/nan.
inline std::string num(double v, int sig) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", sig, v);
    return buf;
}

inline std::string csv_num(double v) { return num(v, 12); }

/// JSON number; non-finite values become null (JSON has no inf/nan).
inline std::string json_num(double v) {
    if (!std::isfinite(v)) return "null";
    return num(v, 17);
}

inline std::string json_str(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
            case '"':  out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
    return out;
}

inline void write_profile_csv(std::ostream& os, const Profile& prof) {
    os << "xi,f,dfm1\n";
    for (const ProfileSample& s : prof.samples)
        os << csv_num(s.xi) << ',' << csv_num(s.f) << ',' << csv_num(s.dfm1) << '\n';
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
    os << "zeta,u,v\n";
    for (const TrajectorySample& s : t.samples)
        os << csv_num(s.zeta) << ',' << csv_num(s.point.u) << ',' << csv_num(s.point.v) << '\n';
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "K,U0_kind,U0_value,U1_kind,U1_value,Q2_kind\n";
    auto kind_str = [](const std::optional<ShootOutcome>& o) {
        return o ? std::string(to_string(o->kind)) : std::string("Inconclusive");
    };
    auto value_str = [](const std::optional<ShootOutcome>& o) {
        if (!o) return std::string("nan");
        if (o->kind == OutcomeKind::BlowDownInfinite) return std::string("inf");
        if (!o->value) return std::string("nan");  // connected: no crossing value exists
        return csv_num(*o->value);
    };
    for (const SweepRow& r : rows)
        os << csv_num(r.K) << ',' << kind_str(r.u0) << ',' << value_str(r.u0) << ',' << kind_str(r.u1)
           << ',' << value_str(r.u1) << ',' << to_string(r.q2_kind) << '\n';
}

inline void write_certificates_json(std::ostream& os, const std::vector<Certificate>& certs) {
    os << "[\n";
    for (std::size_t i = 0; i < certs.size(); ++i) {
        const Certificate& c = certs[i];
        os << "  {\n";
        os << "    \"name\": " << json_str(c.name) << ",\n";
        os << "    \"status\": " << json_str(to_string(c.status)) << ",\n";
        os << "    \"measured\": " << (c.measured ? json_num(*c.measured) : "null") << ",\n";
        os << "    \"expected\": " << (c.expected ? json_num(*c.expected) : "null") << ",\n";
        os << "    \"tolerance\": " << (c.tolerance ? json_num(*c.tolerance) : "null") << ",\n";
        os << "    \"detail\": " << json_str(c.detail) << "\n";
        os << "  }" << (i + 1 < certs.size() ? "," : "") << "\n";
    }
    os << "]\n";
}

inline void write_boundary_report_json(std::ostream& os, const BoundaryReport& r, const std::string& indent) {
    os << "{\n";
    os << indent << "  \"left_slope\": " << json_num(r.left_slope) << ",\n";
    os << indent << "  \"left_slope_expected\": " << json_num(r.left_slope_expected) << ",\n";
    os << indent << "  \"interface_coeff\": " << json_num(r.interface_coeff) << ",\n";
    os << indent << "  \"interface_coeff_expected\": " << json_num(r.interface_coeff_expected) << ",\n";
    os << indent << "  \"origin_coeff\": " << (r.origin_coeff ? json_num(*r.origin_coeff) : "null") << ",\n";
    os << indent << "  \"origin_coeff_expected\": "
       << (r.origin_coeff_expected ? json_num(*r.origin_coeff_expected) : "null") << ",\n";
    os << indent << "  \"ode_residual_max\": " << json_num(r.ode_residual_max) << "\n";
    os << indent << "}";
}

inline void write_profile_json(std::ostream& os, const Profile& prof, const BoundaryReport* report) {
    os << "{\n";
    os << "  \"regime\": {\"K\": " << json_num(prof.regime.K) << ", \"alpha\": " << json_num(prof.regime.alpha)
       << ", \"beta\": " << json_num(prof.regime.beta) << "},\n";
    os << "  \"kind\": " << json_str(to_string(prof.kind)) << ",\n";
    os << "  \"normalization\": " << json_str(to_string(prof.normalization)) << ",\n";
    os << "  \"xi_star\": " << json_num(prof.xi_star) << ",\n";
    os << "  \"xi_0\": " << json_num(prof.xi_0) << ",\n";
    os << "  \"boundary_report\": ";
    if (report)
        write_boundary_report_json(os, *report, "  ");
    else
        os << "null";
    os << ",\n";
    os << "  \"samples\": [\n";
    for (std::size_t i = 0; i < prof.samples.size(); ++i) {
        const ProfileSample& s = prof.samples[i];
        os << "    [" << json_num(s.xi) << ", " << json_num(s.f) << ", " << json_num(s.dfm1) << "]"
           << (i + 1 < prof.samples.size() ? "," : "") << "\n";
    }
    os << "  ]\n";
    os << "}\n";
}

/// Tabulate the self-similar solution u(t, x) = e^{-alpha t} f(|x| e^{beta t})
/// on the product of the given time and radius grids (t-major order).
inline void write_selfsimilar_csv(std::ostream& os, const Parameters& p, const Profile& prof,
                                  const std::vector<double>& times, const std::vector<double>& radii) {
    os << "t,x,u\n";
    for (double t : times)
        for (double r : radii)
            os << csv_num(t) << ',' << csv_num(r) << ',' << csv_num(selfsimilar_u(p, prof, t, r)) << '\n';
}

}  // namespace deadcore::io
