// SPDX-License-Identifier: Apache-2.0
//
// kolmo: command-line front end to the library. Every subcommand renders its
// result into a buffer, which goes to --out (or stdout) and is hashed into a
// run manifest written next to the output.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "kolmo/apriori.hpp"
#include "kolmo/fixtures.hpp"
#include "kolmo/manifest.hpp"
#include "kolmo/quotient_demo.hpp"
#include "kolmo/selftest.hpp"
#include "kolmo/semimeasures.hpp"
#include "kolmo/sf_coder.hpp"
#include "kolmo/universal.hpp"

namespace fs = std::filesystem;
using namespace kolmo;

namespace {

using AnyMachine = std::variant<TableMachine, UniversalMachine>;

// Raised for results that are well-formed but fail a checked property.
struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    std::ostringstream out;
    RunManifest manifest;
    std::string fixture_dir;
};

std::string read_file(Context& ctx, const std::string& label, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ctx.manifest.input_hashes[label] = fnv1a_hex(bytes);
    return bytes;
}

BitString bits(const std::string& s) { return s == "e" ? BitString() : BitString::parse(s); }

bool all_digits(const std::string& s) {
    return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

/// --machine: "U", an enumeration index, a fixture name (from the fixture
/// directory, else built in) or a path to a .tm file.
AnyMachine load_machine(Context& ctx, const std::string& spec) {
    if (spec == "U") {
        ctx.manifest.input_hashes["machine"] = fnv1a_hex("U");
        return UniversalMachine();
    }
    if (all_digits(spec)) {
        const auto m = enumerate_machines(std::stoull(spec));
        ctx.manifest.input_hashes["machine"] = fnv1a_hex(m->to_text());
        return *m;
    }
    if (!ctx.fixture_dir.empty()) {
        const fs::path p = fs::path(ctx.fixture_dir) / (spec + ".tm");
        if (fs::exists(p)) return TableMachine::parse(read_file(ctx, "machine", p.string()));
    }
    if (fs::exists(spec) && fs::is_regular_file(spec)) return TableMachine::parse(read_file(ctx, "machine", spec));
    const auto it = fixtures::texts().find(spec);
    if (it == fixtures::texts().end()) throw InvalidArgument("unknown machine '" + spec + "'");
    ctx.manifest.input_hashes["machine"] = fnv1a_hex(it->second);
    return TableMachine::parse(it->second);
}

std::vector<std::string> read_lines(Context& ctx, const std::string& path) {
    std::string text;
    if (path.empty() || path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
        ctx.manifest.input_hashes["stdin"] = fnv1a_hex(text);
    } else {
        text = read_file(ctx, "input", path);
    }
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

TableApproximator load_phi(Context& ctx, const std::string& path, const std::string& label) {
    std::istringstream in(read_file(ctx, label, path));
    return TableApproximator::read_csv(in);
}

CodeBook load_book(Context& ctx, const std::string& path) {
    std::istringstream in(read_file(ctx, "book", path));
    return read_codebook(in);
}

/// Rows of phi in the column of y, as words.
std::vector<BitString> outputs_in_column(const TableApproximator& phi, const BitString& y) {
    std::vector<BitString> xs;
    for (const auto& [x, col] : phi.keys()) {
        if (col == program_index(y)) xs.push_back(nat_to_string(x - 1));
    }
    return xs;
}

// ---- subcommand bodies ------------------------------------------------------

struct CodesArgs {
    std::string input;
    bool decode = false;
};

void codes_bar_or_std(Context& ctx, const CodesArgs& a, bool standard) {
    for (const auto& line : read_lines(ctx, a.input)) {
        const BitString w = BitString::parse(line);
        if (!a.decode) {
            ctx.out << (standard ? std_encode(w) : bar_encode(w)).str() << '\n';
            continue;
        }
        const auto [x, used] = standard ? std_decode(w) : bar_decode(w);
        if (used != w.size()) throw MalformedStream("trailing bits after codeword '" + line + "'");
        ctx.out << x.str() << '\n';
    }
}

void codes_pair(Context& ctx, const CodesArgs& a) {
    const auto lines = read_lines(ctx, a.input);
    if (a.decode) {
        for (const auto& line : lines) {
            const auto [x, y] = unpair_strings(BitString::parse(line));
            ctx.out << x.str() << '\t' << y.str() << '\n';
        }
        return;
    }
    if (lines.size() % 2 != 0) throw InvalidArgument("pair encoding needs an even number of lines");
    for (std::size_t i = 0; i < lines.size(); i += 2) {
        ctx.out << pair_strings(BitString::parse(lines[i]), BitString::parse(lines[i + 1])).str() << '\n';
    }
}

void codes_kraft(Context& ctx, const CodesArgs& a) {
    std::vector<BitString> words;
    for (const auto& line : read_lines(ctx, a.input)) words.push_back(BitString::parse(line));
    ctx.out << kraft_sum(words).to_string() << '\n';
    if (!is_prefix_free(words)) std::cerr << "kolmo: note: the words are not prefix-free\n";
}

struct VmArgs {
    std::string machine = "copy2";
    std::string program;
    std::string aux;
    std::uint64_t budget = 1000;
    std::uint64_t index = 1;
    std::uint64_t count = 1;
    std::uint64_t max_stage = 100;
    std::optional<std::size_t> length_bound;
    unsigned threads = 1;
};

void vm_run(Context& ctx, const VmArgs& a) {
    const auto m = load_machine(ctx, a.machine);
    const auto r = std::visit([&](const auto& mm) { return run(mm, bits(a.program), bits(a.aux), a.budget); }, m);
    ctx.out << "outcome\toutput\tsteps\tbits_read\n"
            << to_string(r.kind) << '\t' << r.output.str() << '\t' << r.steps << '\t' << r.bits_read << '\n';
}

void vm_enumerate(Context& ctx, const VmArgs& a) {
    for (std::uint64_t i = a.index; i < a.index + a.count; ++i) {
        ctx.out << "# machine " << i << '\n' << enumerate_machines(i)->to_text();
    }
}

void vm_dovetail(Context& ctx, const VmArgs& a) {
    const auto m = load_machine(ctx, a.machine);
    DovetailOptions opts;
    opts.length_bound = a.length_bound;
    opts.threads = a.threads;
    const auto events = std::visit([&](const auto& mm) { return dovetail(mm, bits(a.aux), a.max_stage, opts); }, m);
    ctx.out << "stage\tprogram_index\tprogram\toutput\tsteps\n";
    for (const auto& e : events) {
        ctx.out << e.stage << '\t' << e.program_index << '\t' << e.program.str() << '\t' << e.output.str() << '\t'
                << e.steps << '\n';
    }
}

struct KArgs {
    std::string machine = "copy2";
    std::string x;
    std::string y;
    std::size_t length_bound = 10;
    std::uint64_t step_bound = 1000;
    bool all = false;
    bool soi = false;
    unsigned threads = 1;
};

void k_cmd(Context& ctx, const KArgs& a) {
    const auto m = load_machine(ctx, a.machine);
    if (a.soi) {
        const auto row =
            std::visit([&](const auto& mm) { return soi_report(mm, bits(a.x), bits(a.y), a.length_bound, a.step_bound); }, m);
        write_soi_tsv(ctx.out, {row});
        return;
    }
    const auto ests = std::visit(
        [&](const auto& mm) { return all_estimates(mm, bits(a.y), a.length_bound, a.step_bound, a.threads); }, m);
    ctx.out << "x\ty\tk\twitness\tlength_bound\tstep_bound\n";
    auto row = [&](const BitString& x, const KEstimate* e) {
        ctx.out << x.str() << '\t' << bits(a.y).str() << '\t' << (e ? std::to_string(e->bits) : "-") << '\t'
                << (e ? e->witness.str() : "-") << '\t' << a.length_bound << '\t' << a.step_bound << '\n';
    };
    if (a.all) {
        for (const auto& [x, e] : ests) row(x, &e);
        return;
    }
    const auto it = ests.find(bits(a.x));
    row(bits(a.x), it == ests.end() ? nullptr : &it->second);
}

struct AprioriArgs {
    std::string machine = "copy2";
    std::string aux;
    std::optional<std::uint64_t> max_stage;
    std::uint64_t step_bound = 1000;
    std::size_t length_bound = 10;
    std::string extend;
    unsigned threads = 1;
};

void apriori_cmd(Context& ctx, const AprioriArgs& a) {
    const auto m = load_machine(ctx, a.machine);
    const std::uint64_t stage = a.max_stage.value_or(stage_covering(a.length_bound, a.step_bound));
    AprioriTable table;
    if (!a.extend.empty()) {
        std::istringstream in(read_file(ctx, "table", a.extend));
        const auto old = read_table(in);
        if (old.aux != bits(a.aux)) throw ProvenanceMismatch("table was computed for aux '" + old.aux.str() + "'");
        table = std::visit(
            [&](const auto& mm) { return extend_apriori(old, mm, a.machine, stage, a.length_bound, a.threads); }, m);
    } else {
        table = std::visit(
            [&](const auto& mm) { return approx_apriori(mm, bits(a.aux), stage, a.length_bound, a.machine, a.threads); },
            m);
    }
    write_table(ctx.out, table);
}

struct SemimeasureArgs {
    std::vector<std::string> phi;
    std::vector<std::uint64_t> weights;
    std::uint64_t max_stage = 16;
    bool per_column = false;
    std::uint64_t domain = 8;
};

MixtureSpec spec_from(Context& ctx, const SemimeasureArgs& a) {
    if (!a.weights.empty() && a.weights.size() != a.phi.size()) {
        throw InvalidArgument("--weight must be given once per --phi or not at all");
    }
    const auto bar = bar_weight_exponents(a.phi.size());
    MixtureSpec spec;
    spec.mode = a.per_column ? FreezeMode::PerColumn : FreezeMode::AllColumns;
    for (std::size_t j = 0; j < a.phi.size(); ++j) {
        const std::string name = fs::path(a.phi[j]).stem().string();
        const auto table = load_phi(ctx, a.phi[j], "phi" + std::to_string(j + 1));
        spec.components.push_back({a.weights.empty() ? bar[j] : a.weights[j], table.approximator(name), name});
    }
    return spec;
}

void semimeasure_normalize(Context& ctx, const SemimeasureArgs& a) {
    if (a.phi.size() != 1) throw InvalidArgument("normalize takes exactly one --phi");
    const auto table = load_phi(ctx, a.phi[0], "phi1");
    const auto p = normalize(table.approximator(fs::path(a.phi[0]).stem().string()), a.max_stage,
                             a.per_column ? FreezeMode::PerColumn : FreezeMode::AllColumns);
    write_semimeasure(ctx.out, p);
}

void semimeasure_mixture(Context& ctx, const SemimeasureArgs& a) {
    write_semimeasure(ctx.out, mixture(spec_from(ctx, a), a.max_stage));
}

void semimeasure_dominate(Context& ctx, const SemimeasureArgs& a) {
    const auto spec = spec_from(ctx, a);
    const auto m = mixture(spec, a.max_stage);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> domain;
    for (std::uint64_t x = 1; x <= a.domain; ++x) {
        for (std::uint64_t y = 1; y <= a.domain; ++y) domain.emplace_back(x, y);
    }
    const bool ok = check_domination(m, spec, domain);
    ctx.out << "# provenance " << spec.provenance() << "\n# weight_sum " << spec.weight_sum().to_string()
            << "\ndominates\t" << (ok ? "yes" : "no") << '\n';
    if (!ok) throw CheckFailed("mixture does not dominate its components");
}

struct CodeArgs {
    std::string phi;
    std::string y;
    std::vector<std::string> xs;
    std::string schedule = "dovetail";
    std::uint64_t max_t = 64;
    std::string book;
    std::string x;
    std::string p;
    std::string machine;
    std::size_t length_bound = 10;
    std::uint64_t step_bound = 1000;
};

PsiOptions psi_options(const CodeArgs& a) {
    PsiOptions opts;
    if (a.schedule == "round-robin") {
        opts.schedule = Schedule::RoundRobin;
    } else if (a.schedule != "dovetail") {
        throw InvalidArgument("unknown schedule '" + a.schedule + "'");
    }
    opts.max_t = a.max_t;
    return opts;
}

std::vector<BitString> symbols(const CodeArgs& a, const TableApproximator& phi) {
    if (a.xs.empty()) return outputs_in_column(phi, bits(a.y));
    std::vector<BitString> out;
    for (const auto& s : a.xs) out.push_back(bits(s));
    return out;
}

void code_build(Context& ctx, const CodeArgs& a) {
    const auto phi = load_phi(ctx, a.phi, "phi");
    write_codebook(ctx.out, build_codebook(phi.approximator(fs::path(a.phi).stem().string()), symbols(a, phi),
                                           bits(a.y), psi_options(a)));
}

void code_encode(Context& ctx, const CodeArgs& a) {
    const auto book = load_book(ctx, a.book);
    const auto w = book.codeword(bits(a.x));
    if (!w) throw CheckFailed("no codeword for '" + a.x + "'");
    ctx.out << w->str() << '\n';
}

void code_decode(Context& ctx, const CodeArgs& a) {
    const auto book = load_book(ctx, a.book);
    const auto x = decode(book, bits(a.p), bits(a.y));
    if (!x) throw CheckFailed("'" + a.p + "' is not a codeword; the decoding machine would not halt");
    ctx.out << x->str() << '\n';
}

void code_machine(Context& ctx, const CodeArgs& a) { ctx.out << codebook_to_machine(load_book(ctx, a.book)).to_text(); }

void code_gap(Context& ctx, const CodeArgs& a) {
    GapReport report;
    if (!a.machine.empty()) {
        const auto m = load_machine(ctx, a.machine);
        report = std::visit(
            [&](const auto& mm) { return coding_gap_report(mm, bits(a.y), a.length_bound, a.step_bound); }, m);
    } else {
        if (a.phi.empty()) throw InvalidArgument("code gap needs --machine or --phi");
        const auto phi = load_phi(ctx, a.phi, "phi");
        report = coding_gap_report(phi.approximator(fs::path(a.phi).stem().string()), symbols(a, phi), bits(a.y),
                                   psi_options(a));
    }
    write_gap_tsv(ctx.out, report);
}

struct DemoArgs {
    std::string machine = "bar_echo";
    std::size_t length_bound = 17;
    std::uint64_t step_bound = 60;
    std::uint64_t range = 8;
    std::vector<std::uint64_t> sizes{2, 4, 8};
};

void demo_quotient(Context& ctx, const DemoArgs& a) {
    const auto m = load_machine(ctx, a.machine);
    const auto report = std::visit(
        [&](const auto& mm) { return quotient_report(mm, a.machine, a.length_bound, a.step_bound); }, m);
    write_quotient_tsv(ctx.out, report);
}

void demo_condition_set(Context& ctx, const DemoArgs& a) {
    const auto m = load_machine(ctx, a.machine);
    std::vector<ConditioningSet> family;
    for (const auto s : a.sizes) family.push_back(ConditioningSet::first(s, a.range));
    const auto report = std::visit(
        [&](const auto& mm) { return single_gap_report(mm, a.machine, family, a.length_bound, a.step_bound); }, m);
    write_single_gap_tsv(ctx.out, report);
}

void record_flags(const CLI::App* app, RunManifest& manifest, std::string& path) {
    for (const CLI::Option* opt : app->get_options()) {
        if (opt->count() == 0 || opt->get_name() == "--help") continue;
        manifest.flags[opt->get_name()] = opt->results();
    }
    for (const CLI::App* sub : app->get_subcommands()) {
        path += (path.empty() ? "" : " ") + sub->get_name();
        record_flags(sub, manifest, path);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact experiments with prefix complexity, a priori probability and conditional semimeasures"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    Context ctx;
    std::string out_path;
    std::string manifest_path;
    if (const char* env = std::getenv("KOLMO_FIXTURES")) ctx.fixture_dir = env;
    app.add_option("--out", out_path, "Write the result here instead of stdout");
    app.add_option("--manifest", manifest_path, "Manifest path (default: <out>.manifest.json when --out is given)");
    app.add_option("--fixtures", ctx.fixture_dir, "Directory of .tm fixtures (default: $KOLMO_FIXTURES)");

    std::function<void()> action;
    auto bind = [&](CLI::App* sub, auto fn, auto& args) { sub->callback([&, fn] { action = [&, fn] { fn(ctx, args); }; }); };

    // codes
    CodesArgs codes_args;
    auto* codes = app.add_subcommand("codes", "Self-delimiting codes over lines of 0/1 text (empty line = empty word)");
    codes->require_subcommand(1);
    const std::pair<const char*, const char*> codes_subs[] = {
        {"bar", "Encode each line as bar(x), or decode with --decode"},
        {"std", "Encode each line as the length-prefixed code x', or decode"},
        {"pair", "Pair consecutive lines x, y into <x, y>, or unpair with --decode"},
        {"kraft", "Kraft sum of the lines as a dyadic"},
    };
    for (const auto& [name, help] : codes_subs) {
        auto* sub = codes->add_subcommand(name, help);
        sub->add_option("--input", codes_args.input, "Input file (default stdin)");
        if (std::string(name) != "kraft") sub->add_flag("--decode", codes_args.decode);
    }
    bind(codes->get_subcommand("bar"), [](Context& c, const CodesArgs& a) { codes_bar_or_std(c, a, false); }, codes_args);
    bind(codes->get_subcommand("std"), [](Context& c, const CodesArgs& a) { codes_bar_or_std(c, a, true); }, codes_args);
    bind(codes->get_subcommand("pair"), codes_pair, codes_args);
    bind(codes->get_subcommand("kraft"), codes_kraft, codes_args);

    // vm
    VmArgs vm_args;
    auto* vm = app.add_subcommand("vm", "Run, enumerate and dovetail prefix machines");
    vm->require_subcommand(1);
    auto* vm_run_cmd = vm->add_subcommand("run", "Run one program");
    vm_run_cmd->add_option("--machine", vm_args.machine);
    vm_run_cmd->add_option("--program,-p", vm_args.program)->required();
    vm_run_cmd->add_option("--aux", vm_args.aux);
    vm_run_cmd->add_option("--budget", vm_args.budget);
    bind(vm_run_cmd, vm_run, vm_args);
    auto* vm_enum = vm->add_subcommand("enumerate", "Print machines of the standard enumeration");
    vm_enum->add_option("--index,-i", vm_args.index);
    vm_enum->add_option("--count,-n", vm_args.count);
    bind(vm_enum, vm_enumerate, vm_args);
    auto* vm_dove = vm->add_subcommand("dovetail", "Halting events of the dovetailed run");
    vm_dove->add_option("--machine", vm_args.machine);
    vm_dove->add_option("--aux", vm_args.aux);
    vm_dove->add_option("--max-stage", vm_args.max_stage);
    vm_dove->add_option("--length-bound,-L", vm_args.length_bound);
    vm_dove->add_option("--threads", vm_args.threads);
    bind(vm_dove, vm_dovetail, vm_args);

    // k
    KArgs k_args;
    auto* k = app.add_subcommand("k", "Upper-bound complexity estimates");
    k->add_option("--machine", k_args.machine);
    k->add_option("--x", k_args.x);
    k->add_option("--y", k_args.y);
    k->add_option("-L", k_args.length_bound);
    k->add_option("-S", k_args.step_bound);
    k->add_flag("--all", k_args.all, "Every output reachable within the bounds");
    k->add_flag("--soi", k_args.soi, "Symmetry-of-information row for (x, y)");
    k->add_option("--threads", k_args.threads);
    bind(k, k_cmd, k_args);

    // apriori
    AprioriArgs ap_args;
    auto* ap = app.add_subcommand("apriori", "A priori probability table");
    ap->add_option("--machine", ap_args.machine);
    ap->add_option("--aux", ap_args.aux);
    ap->add_option("--max-stage", ap_args.max_stage, "Default: the stage covering -L and -S");
    ap->add_option("-S", ap_args.step_bound);
    ap->add_option("-L", ap_args.length_bound);
    ap->add_option("--extend", ap_args.extend, "Continue a saved table to the new bounds");
    ap->add_option("--threads", ap_args.threads);
    bind(ap, apriori_cmd, ap_args);

    // semimeasure
    SemimeasureArgs sm_args;
    auto* sm = app.add_subcommand("semimeasure", "Normalization and mixtures of approximator tables");
    sm->require_subcommand(1);
    const std::pair<const char*, const char*> sm_subs[] = {
        {"normalize", "Semimeasure table from one approximator"},
        {"mixture", "Weighted mixture of normalized approximators"},
        {"dominate", "Check the mixture against each weighted component"},
    };
    for (const auto& [name, help] : sm_subs) {
        auto* sub = sm->add_subcommand(name, help);
        sub->add_option("--phi", sm_args.phi, "Approximator CSV (x,y,k,value)")->required();
        sub->add_option("--max-stage", sm_args.max_stage);
        sub->add_flag("--per-column", sm_args.per_column, "Freeze only the columns that overflow");
        if (std::string(name) != "normalize") sub->add_option("--weight", sm_args.weights, "Weight exponents");
        if (std::string(name) == "dominate") sub->add_option("--domain", sm_args.domain);
    }
    bind(sm->get_subcommand("normalize"), semimeasure_normalize, sm_args);
    bind(sm->get_subcommand("mixture"), semimeasure_mixture, sm_args);
    bind(sm->get_subcommand("dominate"), semimeasure_dominate, sm_args);

    // code
    CodeArgs code_args;
    auto* code = app.add_subcommand("code", "Prefix codes from lower approximations");
    code->require_subcommand(1);
    auto* build = code->add_subcommand("build", "Code book for one condition y");
    build->add_option("--phi", code_args.phi)->required();
    build->add_option("--y", code_args.y);
    build->add_option("--xs", code_args.xs, "Symbols (default: every row of phi in the column of y)");
    build->add_option("--schedule", code_args.schedule)->check(CLI::IsMember({"dovetail", "round-robin"}));
    build->add_option("--max-t", code_args.max_t);
    bind(build, code_build, code_args);
    auto* encode = code->add_subcommand("encode", "Shortest codeword of x");
    encode->add_option("--book", code_args.book)->required();
    encode->add_option("--x", code_args.x)->required();
    bind(encode, code_encode, code_args);
    auto* dec = code->add_subcommand("decode", "Symbol of a codeword");
    dec->add_option("--book", code_args.book)->required();
    dec->add_option("--p", code_args.p)->required();
    dec->add_option("--y", code_args.y);
    bind(dec, code_decode, code_args);
    auto* cm = code->add_subcommand("machine", "Decoder as a transition table");
    cm->add_option("--book", code_args.book)->required();
    bind(cm, code_machine, code_args);
    auto* gap = code->add_subcommand("gap", "Code lengths against the a priori bounds");
    gap->add_option("--machine", code_args.machine);
    gap->add_option("--phi", code_args.phi);
    gap->add_option("--y", code_args.y);
    gap->add_option("--xs", code_args.xs);
    gap->add_option("--schedule", code_args.schedule)->check(CLI::IsMember({"dovetail", "round-robin"}));
    gap->add_option("--max-t", code_args.max_t);
    gap->add_option("-L", code_args.length_bound);
    gap->add_option("-S", code_args.step_bound);
    bind(gap, code_gap, code_args);

    // demo
    DemoArgs demo_args;
    auto* demo = app.add_subcommand("demo", "Quotient conditionals on a machine");
    demo->require_subcommand(1);
    const std::pair<const char*, const char*> demo_subs[] = {
        {"quotient", "Conditionals of the joint output table against complexity estimates"},
        {"condition-set", "Conditioning on nested sets of outputs"},
    };
    for (const auto& [name, help] : demo_subs) {
        auto* sub = demo->add_subcommand(name, help);
        sub->add_option("--machine", demo_args.machine);
        sub->add_option("-L", demo_args.length_bound);
        sub->add_option("-S", demo_args.step_bound);
        if (std::string(name) == "condition-set") {
            sub->add_option("--range", demo_args.range, "Words indexed by the characteristic string");
            sub->add_option("--sizes", demo_args.sizes, "Sizes of the nested sets")->delimiter(',');
        }
    }
    bind(demo->get_subcommand("quotient"), demo_quotient, demo_args);
    bind(demo->get_subcommand("condition-set"), demo_condition_set, demo_args);

    // selftest
    unsigned selftest_threads = 1;
    bool selftest_ok = true;
    auto* st = app.add_subcommand("selftest", "Run the invariant suite");
    st->add_option("--threads", selftest_threads);
    st->callback([&] { action = [&] { selftest_ok = run_selftest(ctx.out, selftest_threads); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    int status = 0;
    try {
        action();
    } catch (const CheckFailed& e) {
        std::cerr << "kolmo: " << e.what() << '\n';
        status = 1;
    } catch (const std::exception& e) {
        std::cerr << "kolmo: error: " << e.what() << '\n';
        return 1;
    }
    if (!selftest_ok) status = 1;

    const std::string output = ctx.out.str();
    std::string path;
    record_flags(&app, ctx.manifest, path);
    ctx.manifest.subcommand = path;
    ctx.manifest.output_hash = fnv1a_hex(output);
    if (out_path.empty()) {
        std::cout << output << std::flush;
    } else {
        std::ofstream(out_path, std::ios::binary) << output;
    }
    if (manifest_path.empty() && !out_path.empty()) manifest_path = out_path + ".manifest.json";
    if (!manifest_path.empty()) std::ofstream(manifest_path) << ctx.manifest.to_json().dump(2) << '\n';
    return status;
}
