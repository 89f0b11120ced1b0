#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lealba/alba.hpp"
#include "lealba/errors.hpp"
#include "lealba/fol.hpp"
#include "lealba/gentree.hpp"
#include "lealba/oracle.hpp"
#include "lealba/syntax.hpp"

namespace {

using namespace lealba;

// Input is a literal formula line, a file of lines, or '-' for stdin.
std::vector<std::string> input_lines(const std::string& input) {
  std::vector<std::string> lines;
  auto push = [&](std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      std::string trimmed = line;
      auto first = trimmed.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      if (trimmed[first] == '#' &&
          (first + 1 >= trimmed.size() || !(std::isalnum(static_cast<unsigned char>(trimmed[first + 1])) ||
                                            trimmed[first + 1] == '_')))
        continue;  // comment line
      lines.push_back(line);
    }
  };
  if (input == "-") {
    push(std::cin);
  } else if (std::filesystem::exists(input)) {
    std::ifstream in(input);
    push(in);
  } else {
    lines.push_back(input);
  }
  return lines;
}

VarOrderType parse_eps_flag(const std::string& text) {
  VarOrderType eps;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto pos = item.find(':');
    if (pos == std::string::npos) throw parse_error("bad --eps entry: " + item);
    std::string pol = item.substr(pos + 1);
    if (pol != "1" && pol != "d") throw parse_error("bad polarity in --eps entry: " + item);
    eps[item.substr(0, pos)] = pol == "1" ? Polarity::Pos : Polarity::Neg;
  }
  return eps;
}

DependencyOrder parse_omega_flag(const std::string& text) {
  std::set<std::pair<std::string, std::string>> pairs;
  if (!text.empty() && text != "-") {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto pos = item.find('<');
      if (pos == std::string::npos) throw parse_error("bad --omega entry: " + item);
      pairs.emplace(item.substr(0, pos), item.substr(pos + 1));
    }
  }
  auto closed = DependencyOrder::closure_of(pairs);
  if (!closed) throw parse_error("--omega is not a strict partial order");
  return *closed;
}

std::string worklist_to_string(const std::vector<Inequality>& w) {
  std::string out = "W={";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += "; ";
    out += print_inequality(w[i]);
  }
  out += "}";
  return out;
}

void print_trace(const AlbaResult& result) {
  int n = 0;
  for (const PreStep& st : result.pre_trace)
    std::cout << "STEP " << ++n << " " << rule_name(st.rule) << " @" << st.pos.to_string() << " | "
              << worklist_to_string(st.after) << "\n";
  for (std::size_t k = 0; k < result.traces.size(); ++k) {
    std::cout << "SYSTEM " << k << ": " << print_inequality(result.initial[k]) << "\n";
    for (const TraceStep& st : result.traces[k])
      std::cout << "STEP " << ++n << " " << rule_name(st.rule) << " @" << st.pos.to_string() << " | "
                << print_system(st.after) << "\n";
  }
}

int run_command(const std::string& sig_path, const std::string& input, bool distributive,
                const std::string& strategy, int max_steps, bool simplify, bool trace, bool replay,
                const std::string& eps_flag, const std::string& omega_flag) {
  Signature base = load_signature_file(sig_path);
  if (distributive) base.set_mode(Mode::Distributive);
  ExpandedSignature sig = expand_signature(base);

  RunOptions opts;
  opts.mode = sig.mode();
  opts.max_steps = max_steps;
  if (strategy == "guided") opts.strategy = Strategy::Guided;
  if (strategy == "search") opts.strategy = Strategy::Search;
  if (!eps_flag.empty()) {
    VarOrderType eps = parse_eps_flag(eps_flag);
    DependencyOrder omega = parse_omega_flag(omega_flag);
    opts.witness = {omega, eps};
  }

  int exit_code = 0;
  for (const std::string& line : input_lines(input)) {
    Inequality ineq = parse_inequality(line, sig, ParseOptions{false});
    if (opts.witness && !is_inductive(ineq, opts.witness->first, opts.witness->second, opts.mode, sig))
      throw parse_error("the supplied (omega, eps) witness is not inductive for this inequality");
    AlbaResult result = run(ineq, opts, sig);
    if (trace) print_trace(result);
    if (result.success) {
      std::cout << "SUCCESS\n";
      for (const QuasiInequality& q : result.outputs) {
        if (simplify) {
          auto s = simplify_output(q, sig);
          if (std::holds_alternative<Inequality>(s)) {
            std::cout << "pure: " << print_inequality(std::get<Inequality>(s)) << "\n";
            continue;
          }
        }
        std::cout << "quasi: " << print_quasi(q) << "\n";
      }
    } else {
      std::cout << "FAILURE\n";
      std::cout << "reason: "
                << (result.failure == FailureReason::Budget ? "budget exceeded" : "no applicable rule")
                << "\n";
      for (const System& s : result.stuck) std::cout << "stuck: " << print_system(s) << "\n";
      exit_code = 1;
    }
    std::cout << "CANONICAL: " << (result.canonical_certificate ? "yes" : "no") << "\n";
    if (replay) {
      replay_pre(ineq, result.pre_trace, sig);
      for (std::size_t k = 0; k < result.traces.size(); ++k)
        replay_system(result.initial[k], result.traces[k], opts.mode, sig);
      std::cout << "REPLAY: ok\n";
    }
  }
  return exit_code;
}

int classify_command(const std::string& sig_path, const std::string& input, bool distributive) {
  Signature base = load_signature_file(sig_path);
  if (distributive) base.set_mode(Mode::Distributive);
  ExpandedSignature sig = expand_signature(base);
  for (const std::string& line : input_lines(input)) {
    Inequality ineq = parse_inequality(line, sig, ParseOptions{false});
    std::vector<std::string> order = variables_of(ineq);
    if (auto eps = find_sahlqvist(ineq, sig.mode(), sig)) {
      std::cout << "SAHLQVIST eps=" << eps_to_string(*eps, order) << "\n";
    } else if (auto ind = find_inductive(ineq, sig.mode(), sig)) {
      std::cout << "INDUCTIVE eps=" << eps_to_string(ind->second, order)
                << " omega=" << ind->first.to_string() << "\n";
    } else {
      std::cout << "NEITHER\n";
    }
  }
  return 0;
}

int translate_command(const std::string& sig_path, const std::string& input, bool distributive,
                      const std::string& frames, int max_steps) {
  Signature base = load_signature_file(sig_path);
  if (distributive) base.set_mode(Mode::Distributive);
  ExpandedSignature sig = expand_signature(base);
  for (const std::string& line : input_lines(input)) {
    QuasiInequality q = parse_quasi(line, sig);
    std::vector<QuasiInequality> pure;
    if (is_pure(q)) {
      pure.push_back(q);
    } else {
      if (!q.premises.empty()) throw parse_error("non-pure input must be a plain inequality");
      RunOptions opts;
      opts.mode = sig.mode();
      opts.max_steps = max_steps;
      AlbaResult result = run(q.conclusion, opts, sig);
      if (!result.success) {
        std::cout << "FAILURE\n";
        return 1;
      }
      pure = result.outputs;
    }
    for (const QuasiInequality& item : pure) {
      FOFormula sentence = frames == "tirs" ? translate_quasi_tirs(item, sig)
                                            : translate_quasi_rs(item, sig);
      std::cout << print_fo(simplify_fo(sentence)) << ";\n";
    }
  }
  return 0;
}

int check_command(const std::string& sig_path, const std::string& input, bool distributive,
                  const std::string& model_path, int max_steps) {
  Signature base = load_signature_file(sig_path);
  if (distributive) base.set_mode(Mode::Distributive);
  ExpandedSignature sig = expand_signature(base);
  std::vector<std::pair<std::string, FiniteLE>> models;
  if (!model_path.empty()) {
    models.emplace_back(model_path, load_model_file(model_path, sig));
  } else {
    models = builtin_suite(sig);
  }
  int exit_code = 0;
  for (const std::string& line : input_lines(input)) {
    Inequality ineq = parse_inequality(line, sig, ParseOptions{false});
    RunOptions opts;
    opts.mode = sig.mode();
    opts.max_steps = max_steps;
    AlbaResult result = run(ineq, opts, sig);
    if (!result.success) {
      std::cout << "FAILURE\n";
      exit_code = 1;
      continue;
    }
    for (const auto& [name, model] : models) {
      bool in_valid = valid(ineq, model);
      bool out_valid = true;
      for (const QuasiInequality& q : result.outputs)
        if (!valid_quasi(q, model)) out_valid = false;
      std::cout << "model " << name << ": VALID(in)=" << (in_valid ? "true" : "false")
                << " VALID(out)=" << (out_valid ? "true" : "false")
                << " EQUIVALENT=" << (in_valid == out_valid ? "true" : "false") << "\n";
    }
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ALBA engine for lattice-expansion logics"};
  app.require_subcommand(1);

  std::string sig_path, input, strategy = "auto", frames = "rs", model_path, eps_flag, omega_flag;
  bool distributive = false, simplify = false, trace = false, replay = false;
  int max_steps = 10000;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("signature", sig_path, "signature file")->required();
    cmd->add_option("input", input, "inequality, file of inequalities, or '-' for stdin")->required();
    cmd->add_flag("--distributive", distributive, "use the distributive node classification");
  };

  CLI::App* classify = app.add_subcommand("classify", "Sahlqvist/inductive classification");
  add_common(classify);

  CLI::App* runcmd = app.add_subcommand("run", "reduce to pure quasi-inequalities");
  add_common(runcmd);
  runcmd->add_flag("--trace", trace, "print the rewrite trace");
  runcmd->add_flag("--simplify", simplify, "compact pure output when possible");
  runcmd->add_flag("--replay", replay, "re-apply the recorded trace and verify it");
  runcmd->add_option("--max-steps", max_steps, "rule application budget per system");
  runcmd->add_option("--strategy", strategy, "auto|guided|search")
      ->check(CLI::IsMember({"auto", "guided", "search"}));
  runcmd->add_option("--eps", eps_flag, "order-type witness, e.g. p:1,q:d");
  runcmd->add_option("--omega", omega_flag, "dependency order witness, e.g. p<q,q<r");

  CLI::App* translate = app.add_subcommand("translate", "first-order frame correspondents");
  add_common(translate);
  translate->add_option("--frames", frames, "rs|tirs")->check(CLI::IsMember({"rs", "tirs"}));
  translate->add_option("--max-steps", max_steps, "rule application budget per system");

  CLI::App* check = app.add_subcommand("check", "finite-model equivalence of input and output");
  add_common(check);
  check->add_option("--model", model_path, "model file (default: built-in suite)");
  check->add_option("--max-steps", max_steps, "rule application budget per system");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed()) return classify_command(sig_path, input, distributive);
    if (runcmd->parsed())
      return run_command(sig_path, input, distributive, strategy, max_steps, simplify, trace, replay,
                         eps_flag, omega_flag);
    if (translate->parsed()) return translate_command(sig_path, input, distributive, frames, max_steps);
    if (check->parsed()) return check_command(sig_path, input, distributive, model_path, max_steps);
  } catch (const lealba::model_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const lealba::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
