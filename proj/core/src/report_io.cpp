#include "critline/report_io.hpp"

#include <cmath>
#include <cstdio>

namespace critline::report_io {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string count_report_json(const winding::CountReport& r) {
    std::string j = "{\n";
    j += "  \"format\": \"critline-count-report\",\n";
    j += "  \"version\": 1,\n";
    j += "  \"family\": " + quoted(r.family) + ",\n";
    j += "  \"sign\": " + quoted(r.sign) + ",\n";
    j += "  \"mode\": " + quoted(r.mode) + ",\n";
    j += "  \"a\": " + num(r.a) + ",\n";
    j += "  \"T_requested\": " + num(r.T_requested) + ",\n";
    j += "  \"T_used\": " + num(r.T_used) + ",\n";
    j += "  \"sigma0\": " + num(r.sigma0) + ",\n";
    j += "  \"N\": " + std::to_string(r.N) + ",\n";
    j += "  \"N0\": " + std::to_string(r.N0) + ",\n";
    j += "  \"N0_prime\": " + std::to_string(r.N0_prime) + ",\n";
    j += "  \"B_a\": " + quoted(r.B_a.str()) + ",\n";
    j += "  \"B_a_valid\": " + std::string(r.B_a_valid ? "true" : "false") + ",\n";
    j += "  \"d_estimate\": " + std::to_string(r.d_estimate) + ",\n";
    j += "  \"d_stable\": " + std::string(r.d_stable ? "true" : "false") + ",\n";
    j += "  \"k_gap\": " + std::to_string(r.k_gap) + ",\n";
    j += "  \"inventory\": {\n";
    j += "    \"n_f_a\": " + std::to_string(r.inventory.n_f_a) + ",\n";
    j += "    \"n_f_right\": " + std::to_string(r.inventory.n_f_right) + ",\n";
    j += "    \"P_f_right\": " + std::to_string(r.inventory.P_f_right) + ",\n";
    j += "    \"N_h_right\": " + std::to_string(r.inventory.N_h_right) + ",\n";
    j += "    \"P_h_right\": " + std::to_string(r.inventory.P_h_right) + "\n";
    j += "  },\n";
    j += "  \"parity_ok\": " + std::string(r.parity_ok ? "true" : "false") + ",\n";
    j += "  \"bound_ok\": " + std::string(r.bound_ok ? "true" : "false") + ",\n";
    if (r.strip_sigma0)
        j += "  \"strip_sigma0\": " + num(*r.strip_sigma0) + ",\n";
    // -1 encodes "no certified envelope at sigma0"
    j += "  \"envelope_at_sigma0\": " + num(r.envelope_at_sigma0) + "\n";
    j += "}\n";
    return j;
}

std::string trace_csv(const phase::PhaseTrace& trace, double lattice_offset) {
    std::string out = "# critline trace v1\n";
    char head[120];
    std::snprintf(head, sizeof head, "# a=%.12g tau_min=%.12g tau_max=%.12g offset=%.12g\n",
                  trace.a, trace.tau_min, trace.tau_max, lattice_offset);
    out += head;
    out += "tau,phi,phi_over_pi,cell_index\n";
    char buf[140];
    for (const auto& s : trace.samples) {
        double x = s.phi / pi_const - lattice_offset;
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%ld\n", s.tau, s.phi,
                      s.phi / pi_const, (long)std::floor(x));
        out += buf;
    }
    return out;
}

} // namespace critline::report_io
