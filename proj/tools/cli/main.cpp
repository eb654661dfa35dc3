#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "commands.hpp"
#include "flags.hpp"

namespace {

using dcli::ParameterError;

bool given_on_command_line(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

std::string scalar_text(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return dcli::detail::format_double(v.get<double>());
  throw ParameterError("config: value of '" + key + "' must be a string, number or boolean");
}

// Turns a JSON config into extra command-line tokens. Keys are flag names
// without dashes; an object stored under a subcommand's name applies to that
// subcommand only. Flags already on the command line win.
std::vector<std::string> expand_config(std::vector<std::string> args, const std::set<std::string>& subcommands) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ParameterError("config: missing file name");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(dcli::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw dcli::ParseError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw dcli::FormatError("config: expected a JSON object of flag values");
  std::string command;
  for (const auto& a : rest) {
    if (subcommands.count(a)) {
      command = a;
      break;
    }
  }
  nlohmann::json flat = nlohmann::json::object();
  for (const auto& [k, v] : cfg.items()) {
    if (!(subcommands.count(k) && v.is_object())) flat[k] = v;
  }
  if (!command.empty() && cfg.contains(command) && cfg.at(command).is_object()) {
    for (const auto& [k, v] : cfg.at(command).items()) flat[k] = v;
  }
  std::vector<std::string> extra;
  for (const auto& [k, v] : flat.items()) {
    std::string flag = "--" + k;
    if (given_on_command_line(rest, flag)) continue;
    if (v.is_boolean()) {
      if (v.get<bool>()) extra.push_back(flag);
    } else if (v.is_array()) {
      for (const auto& e : v) extra.push_back(flag + "=" + scalar_text(e, k));
    } else if (!v.is_null()) {
      extra.push_back(flag + "=" + scalar_text(v, k));
    }
  }
  rest.insert(rest.end(), extra.begin(), extra.end());
  return rest;
}

int report(const char* kind, const std::exception& e, int code) {
  std::cerr << "depthcraft: " << kind << ": " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data depth computation and depth-based classification", "depthcraft"};
  app.fallthrough();
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (default: DEPTHCRAFT_THREADS, else all cores)");
  app.set_version_flag("--version", "depthcraft 1.0.0");
  app.footer("Any flag may also come from --config FILE.json; the command line takes precedence.");
  dcli::add_depth_commands(app);
  dcli::add_classifier_commands(app);
  dcli::add_bench_commands(app);
  dcli::add_functional_commands(app);
  app.parse_complete_callback([&threads] {
    if (threads > 0) dcli::set_thread_count(threads);
  });

  std::set<std::string> names;
  for (const auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) names.insert(sub->get_name());
  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args), names);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const depthcraft::ParameterError& e) {
    return report("invalid input", e, 2);
  } catch (const depthcraft::SchemaError& e) {
    return report("invalid model file", e, 2);
  } catch (const depthcraft::Error& e) {
    return report("computation failed", e, 1);
  } catch (const std::exception& e) {
    return report("computation failed", e, 1);
  }
  std::cout.flush();
  return std::cout ? 0 : 1;
}
