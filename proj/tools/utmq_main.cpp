#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "utmq/config.hpp"
#include "utmq/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"utmq: semi-analytical solver for fourth-order evolution problems on the half-line"};

  std::string config_path;
  app.add_option("--config", config_path, "path to the run configuration")->required();
  int threads = -1;
  app.add_option("--threads", threads, "worker threads (default: hardware, or UTMQ_THREADS)");
  double tol = -1.0;
  app.add_option("--tol", tol, "override the quadrature tolerance");
  std::string out_dir;
  app.add_option("--out", out_dir, "output directory (overrides config)");

  CLI11_PARSE(app, argc, argv);

  utmq::CliOverrides ov;
  if (threads > 0) {
    ov.threads = threads;
  } else if (const char* env = std::getenv("UTMQ_THREADS")) {
    ov.threads = std::max(1, std::atoi(env));
  }
  if (tol > 0.0) ov.tol = tol;
  if (!out_dir.empty()) ov.out_dir = out_dir;

  try {
    utmq::Config cfg = utmq::Config::parse_file(config_path);
    const utmq::RunResult run = utmq::run_command(cfg, ov);
    for (const auto& c : run.checks)
      std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  value=" << c.value
                << " threshold=" << c.threshold << "\n";
    std::cout << (run.ok ? "ok" : "checks failed") << ": artifacts in " << run.out_dir
              << "\n";
    return run.ok ? 0 : 1;
  } catch (const utmq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const utmq::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
