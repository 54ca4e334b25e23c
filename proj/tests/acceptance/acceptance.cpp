// End-to-end acceptance run: drives the atomion CLI, reads its CSV output and
// prints one PASS/FAIL line per criterion. Exit status is the number of failures.
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "atomion/eigensolve.hpp"

namespace fs = std::filesystem;
using namespace atomion;

namespace {

const fs::path kWork = ATOMION_ACCEPTANCE_WORK;
const std::vector<double> kSweepG = {0, 0.5, 1, 2, 3, 5, 8, 10, 15, 20, 40, 80};
constexpr double kStep = 0.01;  // centred-difference step in g

using Row = std::map<std::string, std::string>;

std::vector<Row> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing " + path.string());
  std::vector<Row> rows;
  std::string line;
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  std::getline(in, line);
  header = split(line);
  while (std::getline(in, line)) {
    const auto cells = split(line);
    Row r;
    for (std::size_t i = 0; i < header.size(); ++i) r[header[i]] = i < cells.size() ? cells[i] : "";
    rows.push_back(std::move(r));
  }
  return rows;
}

double num(const Row& r, const std::string& key) {
  const auto it = r.find(key);
  if (it == r.end() || it->second.empty()) throw std::runtime_error("empty field " + key);
  return std::stod(it->second);
}

bool same(double a, double b) { return std::abs(a - b) < 1e-9; }

// First row matching beta, g and state (state < 0: any), plus an optional route.
const Row& find(const std::vector<Row>& rows, double beta, double g, int state = -1, const char* route = nullptr) {
  for (const auto& r : rows) {
    if (!same(num(r, "beta"), beta) || !same(num(r, "g"), g)) continue;
    if (state >= 0 && std::stoi(r.at("state")) != state) continue;
    if (route && r.at("route") != route) continue;
    return r;
  }
  throw std::runtime_error("no row for beta=" + std::to_string(beta) + " g=" + std::to_string(g) +
                           " state=" + std::to_string(state));
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v[i]);
    s += (i ? "," : "") + std::string(buf);
  }
  return s + "]";
}

int cli(const std::string& args) {
  const std::string cmd = std::string(ATOMION_CLI) + " -q --cache-root " + (kWork / "cache").string() + " " + args;
  std::cout << "  $ atomion " << args << std::endl;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  failures += !o.passed;
  std::cout << (o.passed ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail << std::endl;
}

}  // namespace

int main() {
  fs::create_directories(kWork);
  std::cout << "work directory " << kWork << std::endl;

  // Pipeline runs. The cache under the work directory makes reruns cheap.
  std::vector<double> main_g = kSweepG;
  main_g.push_back(12.0);
  std::sort(main_g.begin(), main_g.end());
  std::vector<double> hf_g;
  for (double g : {1.0, 5.0, 10.0}) hf_g.insert(hf_g.end(), {g - kStep, g + kStep});
  const std::vector<double> fine_g = {0, 0.5, 1, 2, 3, 5, 8, 10};

  const int rc_main = cli("-o " + (kWork / "main").string() + " -s sweep.g=" + list(main_g) +
                          " -s sweep.beta=[0,1]" +
                          " -s 'emit=[\"spectrum\",\"separations\",\"energies\",\"overlaps\",\"fidelity\"]' sweep");
  const int rc_if = cli("-o " + (kWork / "ionframe").string() + " -s sweep.g=[0,1,10] -s sweep.beta=[1]" +
                        " -s sweep.ion_frame=true -s 'emit=[\"spectrum\",\"energies\",\"effective\"]' sweep");
  const int rc_hf = cli("-o " + (kWork / "hellmann").string() + " -s sweep.g=" + list(hf_g) +
                        " -s sweep.beta=[0] solve");
  const int rc_fine = cli("-o " + (kWork / "fine").string() + " -s grid.cmf_points=512 -s sweep.g=" + list(fine_g) +
                          " -s sweep.beta=[0,1] solve");
  std::cout << "exit codes: main " << rc_main << ", ion frame " << rc_if << ", hellmann " << rc_hf << ", fine "
            << rc_fine << std::endl;

  auto load = [](const char* dir, const char* file) {
    try {
      return read_csv(kWork / dir / file);
    } catch (const std::exception& e) {
      std::cout << "  " << e.what() << std::endl;
      return std::vector<Row>{};
    }
  };
  const auto spectrum = load("main", "spectrum.csv");
  const auto separations = load("main", "separations.csv");
  const auto energies = load("main", "energies.csv");
  const auto overlaps = load("main", "overlaps.csv");
  const auto fidelity = load("main", "fidelity.csv");
  const auto if_spectrum = load("ionframe", "spectrum.csv");
  const auto if_energies = load("ionframe", "energies.csv");
  const auto smf = load("ionframe", "smf.csv");
  const auto effective = load("ionframe", "effective.csv");
  const auto hf = load("hellmann", "spectrum.csv");
  const auto fine = load("fine", "spectrum.csv");

  const ModelParams p = default_params();

  criterion(1, "bound-state structure", [&] {
    const Grid1D g = make_grid(4.0, 512);
    const auto sp = solve_1d(build_h1b(g, p));
    int negative = 0;
    for (double e : sp.energies) negative += e < 0.0;
    double peaks[2];
    for (int s = 0; s < 2; ++s) {
      std::size_t best = g.origin();
      for (std::size_t k = g.origin(); k < g.size(); ++k)
        if (std::abs(sp.orbitals[s][k]) > std::abs(sp.orbitals[s][best])) best = k;
      peaks[s] = g.point(best);
    }
    const bool ok = negative == 2 && std::abs(peaks[0] - 0.3) <= 0.05 && std::abs(peaks[1] - 0.3) <= 0.05;
    return Outcome{ok, fmt("%.0f negative eigenvalues; |phi0|^2 peaks at |z|=%.4f, |phi1|^2 at |z|=%.4f (0.3 +- 0.05)",
                           negative, peaks[0], peaks[1])};
  });

  criterion(2, "separable limit", [&] {
    // Oracle: dense diagonalisation of h_1b on the relative grid.
    const auto e = solve_1d(build_h1b(make_grid(4.0, 256), p)).energies;
    const double oracle[5] = {2 * e[0], e[0] + e[1], 2 * e[1], e[0] + e[2], e[0] + e[3]};
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) worst = std::max(worst, std::abs(num(find(spectrum, 0, 0, s), "spectrum.energy") - oracle[s]));
    return Outcome{worst <= 1e-8, fmt("max |E_k - oracle| = %.3e (tolerance 1e-8)", worst)};
  });

  criterion(3, "Tonks-Girardeau limit", [&] {
    const auto e = solve_1d(build_h1b(make_grid(4.0, 256), p)).energies;
    const double tg = e[0] + e[1];
    const double e80 = num(find(spectrum, 0, 80, 0), "spectrum.energy");
    const double rel = std::abs(e80 - tg) / std::abs(tg);
    const double daa = num(find(separations, 0, 80, 0), "sep.d_AA");
    return Outcome{rel <= 0.02 && std::abs(daa - 0.6) <= 0.05,
                   fmt("E0(g=80) = %.6f vs e0+e1 = %.6f (relative %.4f, tolerance 0.02); d_AA(g=80) = %.4f (0.6 +- 0.05)",
                       e80, tg, rel, daa)};
  });

  criterion(4, "monotonicity and Hellmann-Feynman", [&] {
    bool mono = true;
    for (int s = 0; s < 5; ++s)
      for (std::size_t i = 1; i < kSweepG.size(); ++i)
        if (num(find(spectrum, 0, kSweepG[i], s), "spectrum.energy") <
            num(find(spectrum, 0, kSweepG[i - 1], s), "spectrum.energy"))
          mono = false;
    double worst = 0.0;
    for (double g : {1.0, 5.0, 10.0})
      for (int s = 0; s < 5; ++s) {
        const double de = (num(find(hf, 0, g + kStep, s), "spectrum.energy") -
                           num(find(hf, 0, g - kStep, s), "spectrum.energy")) /
                          (2 * kStep);
        const double contact = num(find(separations, 0, g, s), "sep.contact");
        worst = std::max(worst, std::abs(de - contact) / std::abs(contact));
      }
    return Outcome{mono && worst < 0.05,
                   std::string(mono ? "all five beta=0 levels non-decreasing in g" : "a beta=0 level decreases in g") +
                       fmt("; max |dE/dg - <delta>| / <delta> = %.3e (tolerance 0.05)", worst)};
  });

  criterion(5, "mobility shift", [&] {
    double least = 1e300;
    for (double g : kSweepG)
      for (int s = 0; s < 5; ++s)
        least = std::min(least, num(find(spectrum, 1, g, s), "spectrum.energy") -
                                    num(find(spectrum, 0, g, s), "spectrum.energy"));
    return Outcome{least > 0.0, fmt("smallest relative-frame shift E(beta=1) - E(beta=0) = %.6f", least)};
  });

  criterion(6, "frame equivalence", [&] {
    double worst = 0.0;
    std::string d;
    for (double g : {0.0, 1.0}) {
      const auto& r = find(if_spectrum, 1, g, 0);
      const double e_if = num(r, "spectrum.if_energy"), e_cm = num(r, "spectrum.energy_lab");
      const double rel = std::abs(e_if - e_cm) / std::abs(e_cm);
      worst = std::max(worst, rel);
      d += fmt("g=%g: ion frame %.8f vs %.8f; ", g, e_if, e_cm);
    }
    return Outcome{worst <= 0.01, d + fmt("max relative difference %.3e (tolerance 0.01)", worst)};
  });

  criterion(7, "energy decomposition", [&] {
    double worst_sum = 0.0;
    for (double beta : {0.0, 1.0})
      for (double g : {0.0, 1.0, 10.0})
        for (int s = 0; s < 5; ++s) {
          const auto& r = find(energies, beta, g, s, "cmf");
          worst_sum = std::max(worst_sum, std::abs(num(r, "energy.sum") - num(r, "energy.total")));
        }
    double worst_route = 0.0;
    for (double g : {0.0, 1.0, 10.0}) {
      const auto& a = find(if_energies, 1, g, 0, "cmf");
      const auto& b = find(if_energies, 1, g, 0, "if");
      worst_sum = std::max(worst_sum, std::abs(num(b, "energy.sum") - num(b, "energy.total")));
      for (const char* k : {"energy.K_A", "energy.P_A", "energy.V_AA", "energy.V_AI", "energy.K_I", "energy.P_I"}) {
        const double x = num(a, k), y = num(b, k);
        const double scale = std::max(std::abs(x), std::abs(y));
        if (scale > 1e-9) worst_route = std::max(worst_route, std::abs(x - y) / scale);
      }
    }
    return Outcome{worst_sum <= 1e-6 && worst_route <= 0.01,
                   fmt("max |sum - total| = %.3e (tolerance 1e-6); max relative component difference between "
                       "routes = %.3e (tolerance 0.01)",
                       worst_sum, worst_route)};
  });

  criterion(8, "bunching anchors", [&] {
    const double g0 = num(find(separations, 0, 0, 0), "sep.P_bunched");
    const double g0e = num(find(separations, 0, 0, 1), "sep.P_bunched");
    const double g10 = num(find(separations, 0, 10, 0), "sep.P_bunched");
    const bool ok = std::abs(g0 - 0.5) <= 1e-3 && g0e > 0.99 && g10 < 0.05;
    return Outcome{ok, fmt("ground g=0: %.6f (0.5 +- 1e-3); first excited g=0: %.6f (> 0.99); ground g=10: %.6f (< 0.05)",
                           g0, g0e, g10)};
  });

  criterion(9, "number-state anchors", [&] {
    const double w2000 = num(find(overlaps, 0, 0, 0), "overlap.n2000");
    std::vector<double> w;
    for (double g : {0.0, 10.0, 40.0}) w.push_back(num(find(overlaps, 1, g, 1), "overlap.n0110"));
    double mean = 0.0;
    for (double x : w) mean += x / static_cast<double>(w.size());
    bool ok = std::abs(w2000 - 1.0) <= 1e-6;
    double spread = 0.0;
    for (double x : w) {
      ok = ok && std::abs(x - 0.10) <= 0.04;
      spread = std::max(spread, std::abs(x - mean));
    }
    ok = ok && spread <= 0.03;
    return Outcome{ok, fmt("|2,0,0,0> weight %.9f (1 +- 1e-6); |0,1,1,0> in the beta=1 first excited state at "
                           "g=0,10,40: %.4f %.4f %.4f",
                           w2000, w[0], w[1], w[2]) +
                           fmt(" (0.10 +- 0.04, spread %.4f <= 0.03)", spread)};
  });

  criterion(10, "ion localisation trend", [&] {
    std::vector<double> ki, pi;
    for (double g : {0.0, 1.0, 3.0, 10.0}) {
      const auto& r = find(energies, 1, g, 0, "cmf");
      ki.push_back(num(r, "energy.K_I"));
      pi.push_back(num(r, "energy.P_I"));
    }
    bool ok = true;
    for (std::size_t i = 1; i < ki.size(); ++i) ok = ok && ki[i] > ki[i - 1] && pi[i] < pi[i - 1];
    return Outcome{ok, "K_I at g=0,1,3,10: " + list(ki) + "; P_I: " + list(pi)};
  });

  criterion(11, "SMF invariance and variational bound", [&] {
    std::vector<double> ion_e, smf_e, if_e;
    for (double g : {0.0, 1.0, 10.0}) {
      const auto& r = find(smf, 1, g);
      ion_e.push_back(num(r, "smf.ion_energy"));
      smf_e.push_back(num(r, "smf.energy"));
      if_e.push_back(num(r, "smf.if_energy"));
    }
    // Ion factor orbitals across g.
    std::map<double, std::vector<double>> orb;
    for (const auto& r : effective)
      if (r.at("species") == "ion" && r.at("source") == "smf") orb[num(r, "g")].push_back(num(r, "effective.orbital"));
    double diff = 0.0;
    for (std::size_t i = 1; i < ion_e.size(); ++i) diff = std::max(diff, std::abs(ion_e[i] - ion_e[0]));
    const auto& ref = orb.at(0.0);
    for (const auto& [g, o] : orb)
      for (std::size_t k = 0; k < ref.size(); ++k) diff = std::max(diff, std::abs(o.at(k) - ref[k]));
    bool bound = true;
    for (std::size_t i = 0; i < smf_e.size(); ++i) bound = bound && smf_e[i] >= if_e[i];
    return Outcome{diff <= 1e-10 && bound, fmt("max ion-factor difference across g %.3e (tolerance 1e-10); ", diff) +
                                               "SMF energies " + list(smf_e) + " vs exact " + list(if_e)};
  });

  criterion(12, "fidelity ordering", [&] {
    const auto& r = find(fidelity, 1, 12, 0);
    const double a = num(r, "fidelity.b1_g0"), b = num(r, "fidelity.b0_g0"), c = num(r, "fidelity.b0_gsame");
    return Outcome{c > a && c > b, fmt("g=12, beta=1 ground: F(beta=1,g=0)=%.4f F(beta=0,g=0)=%.4f F(beta=0,g=12)=%.4f",
                                       a, b, c)};
  });

  criterion(13, "grid convergence", [&] {
    double worst = 0.0;
    for (double beta : {0.0, 1.0})
      for (double g : fine_g)
        for (int s = 0; s < 5; ++s)
          worst = std::max(worst, std::abs(num(find(fine, beta, g, s), "spectrum.energy") -
                                           num(find(spectrum, beta, g, s), "spectrum.energy")));
    return Outcome{worst < 1e-4, fmt("max eigenvalue shift from n=256 to n=512 at g<=10: %.3e (tolerance 1e-4)", worst)};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed") << std::endl;
  return failures;
}
