// qcfb: run a feedback-network netlist and write summary, manifest and series files.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "qcfb/errors.hpp"
#include "qcfb/netlist.hpp"
#include "qcfb/runner.hpp"

namespace fs = std::filesystem;
using namespace qcfb::netlist;

namespace {

struct Sweep {
  std::string path;
  double lo = 0, hi = 0;
  int n = 0;
};

Sweep parse_sweep(const std::string& s) {
  const auto eq = s.find('=');
  const auto c1 = s.find(':', eq);
  const auto c2 = c1 == std::string::npos ? c1 : s.find(':', c1 + 1);
  if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos)
    throw CLI::ValidationError("--sweep", "expected param=lo:hi:n");
  Sweep w;
  w.path = s.substr(0, eq);
  try {
    w.lo = std::stod(s.substr(eq + 1, c1 - eq - 1));
    w.hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    w.n = std::stoi(s.substr(c2 + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--sweep", "bad number in '" + s + "'");
  }
  if (w.n < 1) throw CLI::ValidationError("--sweep", "n must be positive");
  return w;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int report(const std::exception& e, const std::string& netlist) {
  const int code = exit_code_for(e);
  if (code == 2)
    std::cerr << netlist << ":" << e.what() << "\n";
  else
    std::cerr << "error: " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent-feedback network runner"};
  std::string netlist_path, out_dir, sweep_arg, trunc_arg, format = "csv";
  unsigned long long seed = 0;
  bool verbose = false, print_only = false;
  app.add_option("--netlist", netlist_path, "netlist file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--sweep", sweep_arg, "param=lo:hi:n, e.g. loop.k1.G0=50:200:4");
  app.add_option("--truncation-override", trunc_arg, "label=levels[,label=levels...]");
  app.add_option("--seed", seed, "recorded in the manifest; the pipeline is deterministic");
  app.add_option("--format", format, "series file format")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--print", print_only, "parse, print the canonical netlist and exit");
  app.add_flag("-v,--verbose", verbose, "debug logging");
  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  Netlist base;
  try {
    base = parse(read_file(netlist_path));
    if (!trunc_arg.empty()) {
      std::stringstream ss(trunc_arg);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw qcfb::ParseError("truncation override '" + item + "' needs label=levels", 0, 0);
        override_truncation(base, item.substr(0, eq), std::stoi(item.substr(eq + 1)));
      }
    }
  } catch (const std::exception& e) {
    return report(e, netlist_path);
  }

  if (print_only) {
    std::cout << print(base);
    return 0;
  }

  RunOptions opts;
  opts.format = format == "json" ? Format::Json : Format::Csv;
  opts.seed = seed;
  opts.netlist_path = netlist_path;

  if (sweep_arg.empty()) {
    try {
      opts.out_dir = out_dir;
      for (const auto& a : run(base, opts)) spdlog::info("wrote {}", a);
      return 0;
    } catch (const std::exception& e) {
      return report(e, netlist_path);
    }
  }

  Sweep sw;
  try {
    sw = parse_sweep(sweep_arg);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  std::vector<double> values(sw.n);
  for (int k = 0; k < sw.n; ++k) values[k] = sw.n == 1 ? sw.lo : sw.lo + (sw.hi - sw.lo) * k / (sw.n - 1);
  std::vector<int> codes(sw.n, 0);
  std::vector<std::string> messages(sw.n);
  std::atomic<int> next{0};
  std::mutex err_mu;
  auto worker = [&] {
    for (int k = next++; k < sw.n; k = next++) {
      RunOptions o = opts;
      char dir[32];
      std::snprintf(dir, sizeof dir, "sweep_%03d", k);
      o.out_dir = fs::path(out_dir) / dir;
      try {
        Netlist n = base;
        override_value(n, sw.path, values[k]);
        run(n, o);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mu);
        codes[k] = report(e, netlist_path);
        messages[k] = e.what();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(sw.n, std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  fs::create_directories(out_dir);
  std::ofstream idx(fs::path(out_dir) / "sweep.csv", std::ios::binary);
  idx << "# qcfb sweep " << sw.path << "\nindex,value,exit_code\n";
  int worst = 0;
  for (int k = 0; k < sw.n; ++k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%d\n", k, values[k], codes[k]);
    idx << buf;
    if (codes[k] && !worst) worst = codes[k];
  }
  return worst;
}
