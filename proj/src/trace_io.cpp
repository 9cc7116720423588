#include "amp/trace_io.hpp"

#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>

namespace amp {

namespace {

class Writer {
  public:
    Writer(const std::string& path) : path_(path), f_(std::fopen(path.c_str(), "wb")) {
        if (!f_) throw IoError("cannot open for writing: " + path_ + ": " +
                               std::strerror(errno));
    }
    ~Writer() {
        if (f_) std::fclose(f_);
    }
    void close() {
        bool bad = std::ferror(f_) != 0;
        bad |= std::fclose(f_) != 0;
        f_ = nullptr;
        if (bad) throw IoError("write failed: " + path_);
    }
    std::FILE* get() { return f_; }

  private:
    std::string path_;
    std::FILE* f_;
};

[[noreturn]] void parse_fail(const std::string& path, size_t line,
                             const std::string& reason) {
    throw IoError(path + ":" + std::to_string(line) + ": " + reason);
}

// returns false at end of input; strips the trailing \r of CRLF files
bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

double parse_double(const char* begin, const char** end_out, const std::string& path,
                    size_t line, const char* what) {
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (end == begin || errno == ERANGE)
        parse_fail(path, line, std::string("bad ") + what);
    *end_out = end;
    return v;
}

uint64_t parse_index(const char* begin, const char** end_out, const std::string& path,
                     size_t line) {
    char* end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || errno == ERANGE || *begin == '-')
        parse_fail(path, line, "bad bin index");
    *end_out = end;
    return v;
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_binned_csv(const std::string& path, const BinnedTrace& trace,
                      uint64_t seed) {
    Writer w(path);
    std::fprintf(w.get(), "# delta=%.17g origin=%.17g n=%zu seed=%" PRIu64 "\n",
                 trace.bin_width, trace.origin, trace.values.size(), seed);
    std::fprintf(w.get(), "bin_index,value\n");
    for (size_t i = 0; i < trace.values.size(); ++i)
        std::fprintf(w.get(), "%zu,%.17g\n", i, trace.values[i]);
    w.close();
}

BinnedCsv read_binned_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);

    std::string line;
    size_t lineno = 1;
    if (!next_line(in, line)) parse_fail(path, lineno, "empty file");
    BinnedCsv out;
    size_t n = 0;
    unsigned long long seed = 0;
    int consumed = 0;
    if (std::sscanf(line.c_str(), "# delta=%lf origin=%lf n=%zu seed=%llu%n",
                    &out.trace.bin_width, &out.trace.origin, &n, &seed,
                    &consumed) != 4 ||
        static_cast<size_t>(consumed) != line.size())
        parse_fail(path, lineno,
                   "expected preamble '# delta=<w> origin=<t0> n=<len> seed=<seed>'");
    if (!(out.trace.bin_width > 0.0) || !std::isfinite(out.trace.bin_width))
        parse_fail(path, lineno, "bin width must be positive");
    if (!std::isfinite(out.trace.origin))
        parse_fail(path, lineno, "origin must be finite");
    out.seed = seed;

    ++lineno;
    if (!next_line(in, line) || line != "bin_index,value")
        parse_fail(path, lineno, "expected header 'bin_index,value'");

    out.trace.values.reserve(n);
    while (next_line(in, line)) {
        ++lineno;
        if (line.empty()) parse_fail(path, lineno, "empty row");
        const char* cur = line.c_str();
        const char* end = nullptr;
        uint64_t idx = parse_index(cur, &end, path, lineno);
        if (*end != ',') parse_fail(path, lineno, "expected ',' after bin index");
        if (idx != out.trace.values.size())
            parse_fail(path, lineno, "bin index out of order");
        double v = parse_double(end + 1, &end, path, lineno, "value");
        if (*end != '\0') parse_fail(path, lineno, "trailing characters");
        out.trace.values.push_back(v);
    }
    if (out.trace.values.size() != n)
        parse_fail(path, lineno + 1,
                   "preamble declares " + std::to_string(n) + " rows, found " +
                       std::to_string(out.trace.values.size()));
    return out;
}

void write_event_csv(const std::string& path, const RenewalTimeline& timeline) {
    Writer w(path);
    std::fprintf(w.get(), "t_start,duration,rate\n");
    for (const auto& e : timeline.epochs)
        std::fprintf(w.get(), "%.17g,%.17g,%.17g\n", e.s, e.x, e.a);
    w.close();
}

std::vector<EventRow> read_event_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);

    std::string line;
    size_t lineno = 1;
    if (!next_line(in, line) || line != "t_start,duration,rate")
        parse_fail(path, lineno, "expected header 't_start,duration,rate'");

    std::vector<EventRow> rows;
    while (next_line(in, line)) {
        ++lineno;
        if (line.empty()) parse_fail(path, lineno, "empty row");
        const char* cur = line.c_str();
        const char* end = nullptr;
        EventRow r{};
        r.t_start = parse_double(cur, &end, path, lineno, "t_start");
        if (*end != ',') parse_fail(path, lineno, "expected ',' after t_start");
        r.duration = parse_double(end + 1, &end, path, lineno, "duration");
        if (*end != ',') parse_fail(path, lineno, "expected ',' after duration");
        r.rate = parse_double(end + 1, &end, path, lineno, "rate");
        if (*end != '\0') parse_fail(path, lineno, "trailing characters");
        rows.push_back(r);
    }
    return rows;
}

}  // namespace amp
