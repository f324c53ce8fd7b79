#include "implab/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace implab {

std::string fmt(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt(std::complex<double> v) { return fmt(v.real()) + "," + fmt(v.imag()); }

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

double to_double(const std::string& s, const std::string& path, int line_no) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p == b)
        throw ValidationError(path + ":" + std::to_string(line_no) + ": not a number: '" + s +
                              "'");
    return v;
}

bool numeric_start(const std::string& line) {
    for (char c : line) {
        if (c == ' ' || c == '\t') continue;
        return (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.';
    }
    return false;
}

} // namespace

std::vector<std::complex<double>> read_points_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open points CSV: " + path);
    std::vector<std::complex<double>> pts;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!numeric_start(line)) continue; // header row
        const auto cells = split_csv_line(line);
        if (cells.size() < 2)
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": expected columns re,im");
        pts.emplace_back(to_double(cells[0], path, line_no), to_double(cells[1], path, line_no));
    }
    if (pts.empty()) throw ValidationError(path + ": no points found");
    return pts;
}

std::vector<std::complex<double>> read_sigma_table_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open sigma table: " + path);
    std::vector<std::complex<double>> values;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!numeric_start(line)) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < 3)
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": expected columns k,re,im");
        const auto k = static_cast<std::size_t>(to_double(cells[0], path, line_no));
        if (k != values.size())
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": k must run 0,1,2,... without gaps");
        values.emplace_back(to_double(cells[1], path, line_no), to_double(cells[2], path, line_no));
    }
    if (values.empty()) throw ValidationError(path + ": no sigma values found");
    return values;
}

template <typename R>
void write_trace_csv(const OrbitTrace<R>& tr, std::ostream& os, const std::string& config_hash) {
    if (!config_hash.empty()) os << "# implab orbit trace, config=" << config_hash << "\n";
    os << "k,re_w,im_w\n";
    for (std::size_t k = 0; k < tr.points.size(); ++k)
        os << k << ',' << fmt(static_cast<double>(tr.points[k].real())) << ','
           << fmt(static_cast<double>(tr.points[k].imag())) << '\n';
}

template void write_trace_csv<double>(const OrbitTrace<double>&, std::ostream&,
                                      const std::string&);
template void write_trace_csv<long double>(const OrbitTrace<long double>&, std::ostream&,
                                           const std::string&);

void write_reports_csv(const std::vector<ImplosionReport>& reports, std::ostream& os,
                       const std::string& config_hash) {
    if (!config_hash.empty()) os << "# implab implosion report, config=" << config_hash << "\n";
    os << "n,seed,k_n,beta,re_u_n,im_u_n,re_w0,im_w0,re_w_final,im_w_final,"
          "re_lavaurs,im_lavaurs,error_abs,error_chordal,status,rn_exit,branch_jump,"
          "max_resid_psi,max_resid_phi,march_max,ratio_kn3_n2,ratio_nlog_kn2,message\n";
    for (const auto& r : reports) {
        const char* status = r.failed                          ? "failed"
                             : r.status == RunStatus::ok       ? "ok"
                             : r.status == RunStatus::degraded ? "degraded"
                                                               : "escaped";
        os << r.n << ',' << r.seed << ',' << r.k_n << ',' << fmt(r.beta) << ',' << fmt(r.u_n)
           << ',' << fmt(r.w0) << ',' << fmt(r.w_final) << ',' << fmt(r.lavaurs_value) << ','
           << fmt(r.error) << ',' << fmt(r.error_chordal) << ',' << status << ','
           << (r.rn_exit ? std::to_string(*r.rn_exit) : std::string()) << ','
           << (r.branch_jump ? 1 : 0) << ',' << fmt(r.max_resid_psi) << ','
           << fmt(r.max_resid_phi) << ',' << fmt(r.march_max) << ',' << fmt(r.ratio_kn3_n2) << ','
           << fmt(r.ratio_nlog_kn2) << ',' << r.message << '\n';
    }
}

void write_diagnostics_csv(const ImplosionReport& report, std::ostream& os,
                           const std::string& config_hash) {
    if (!config_hash.empty()) os << "# implab step diagnostics, config=" << config_hash << "\n";
    os << "k,re_U,im_U,re_W,im_W,re_A,im_A,re_Atilde,im_Atilde,in_Rn,re_H,im_H,"
          "resid_psi,resid_phi\n";
    for (const auto& d : report.diagnostics) {
        os << d.k << ',' << fmt(d.U) << ',' << fmt(d.W) << ',' << fmt(d.A) << ','
           << fmt(d.A_tilde) << ',' << (d.in_rn ? 1 : 0) << ',' << fmt(d.H_value) << ','
           << fmt(d.resid_psi) << ',' << fmt(d.resid_phi) << '\n';
    }
}

} // namespace implab
