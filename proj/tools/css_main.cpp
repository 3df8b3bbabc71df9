// Command-line front end: css verify|spectrum|solve|landscape --config <path>
#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "css/css.h"

namespace {

int fail_config(const char* what) {
  std::fprintf(stderr, "css: %s: %s\n", what, css_last_error());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational solver and verification suite for planar Chern-Simons-Schrodinger standing waves"};
  app.set_version_flag("--version", css_version());
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  const char* names[] = {"verify", "spectrum", "solve", "landscape"};
  const char* help[] = {"run the identity and invariant battery", "report the negative spectrum of -Delta + V",
                        "compute a nontrivial critical point", "write ray scans and local-linking samples"};
  CLI::App* subs[4];
  CLI::Option* seed_opts[4];
  for (int k = 0; k < 4; ++k) {
    subs[k] = app.add_subcommand(names[k], help[k]);
    subs[k]->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
    subs[k]->add_option("--out", out_dir, "output directory (overrides output.dir)");
    seed_opts[k] = subs[k]->add_option("--seed", seed, "RNG seed (overrides seed)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  int which = 0;
  for (int k = 0; k < 4; ++k)
    if (subs[k]->parsed()) which = k;

  css_config* cfg = nullptr;
  if (css_config_load(config_path.c_str(), &cfg) != CSS_OK) return fail_config("config");
  if (!out_dir.empty() && css_config_set(cfg, "output.dir", out_dir.c_str()) != CSS_OK) {
    css_config_free(cfg);
    return fail_config("--out");
  }
  if (seed_opts[which]->count() > 0 &&
      css_config_set(cfg, "seed", std::to_string(seed).c_str()) != CSS_OK) {
    css_config_free(cfg);
    return fail_config("--seed");
  }

  using Runner = css_status (*)(const css_config*, int*, char**);
  const Runner runners[] = {css_run_verify, css_run_spectrum, css_run_solve, css_run_landscape};
  int exit_code = 0;
  char* report = nullptr;
  const css_status st = runners[which](cfg, &exit_code, &report);
  css_config_free(cfg);
  if (st != CSS_OK) {
    std::fprintf(stderr, "css: %s: %s\n", css_status_name(st), css_last_error());
    return 4;
  }
  std::fputs(report, stdout);
  css_string_free(report);
  return exit_code;
}
