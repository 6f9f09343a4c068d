#include "hhc/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hhc {

static std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

static void write_header(std::ostream& os, const char* kind, const char* alpha,
                         const StaggeredGrid& g) {
  os << "HHC-FIELD v1 " << kind << ' ' << alpha << ' ' << g.spec.n1 << ' ' << g.spec.n2
     << ' ' << fmt17(g.spec.l1) << ' ' << fmt17(g.spec.l2) << '\n';
}

static void write_values(std::ostream& os, const std::vector<double>& v) {
  for (double x : v) os << fmt17(x) << '\n';
}

void write_snapshot(std::ostream& os, const ScalarField& f) {
  write_header(os, "scalar", "-", f.grid());
  write_values(os, f.values());
}

void write_snapshot(std::ostream& os, const FluxField& f) {
  write_header(os, "flux", f.alpha() == 1 ? "1" : "2", f.grid());
  write_values(os, f.values());
}

template <class F>
static void write_file(const std::string& path, const F& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_snapshot(os, f);
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_snapshot_file(const std::string& path, const ScalarField& f) { write_file(path, f); }
void write_snapshot_file(const std::string& path, const FluxField& f) { write_file(path, f); }

SnapshotField read_snapshot(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("snapshot: empty stream");
  std::istringstream hs(line);
  std::string magic, ver, kind, alpha;
  GridSpec spec;
  hs >> magic >> ver >> kind >> alpha >> spec.n1 >> spec.n2 >> spec.l1 >> spec.l2;
  if (!hs || magic != "HHC-FIELD" || ver != "v1")
    throw std::runtime_error("snapshot: bad header: " + line);
  StaggeredGrid g = build_grid(spec);

  auto read_into = [&](std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::getline(is, line)) throw std::runtime_error("snapshot: truncated values");
      v[i] = std::stod(line);
    }
  };

  if (kind == "scalar") {
    ScalarField f(g);
    read_into(f.values());
    return f;
  }
  if (kind == "flux") {
    int a = alpha == "1" ? 1 : alpha == "2" ? 2 : 0;
    if (a == 0) throw std::runtime_error("snapshot: bad flux direction: " + alpha);
    FluxField f(g, a);
    read_into(f.values());
    return f;
  }
  throw std::runtime_error("snapshot: unknown field kind: " + kind);
}

SnapshotField read_snapshot_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return read_snapshot(is);
}

}  // namespace hhc
