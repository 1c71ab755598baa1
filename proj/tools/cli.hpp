#pragma once

// Command-line front end. run() is separate from main() so the test suite
// can drive every command in-process.
//
// Exit codes: 0 success, 1 verification failure or negative finding,
// 2 invalid input, 3 resource limit (budget, memory cap, 64-bit overflow).

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stanley/stanley.hpp"

namespace stanley::cli {

enum exit_code : int { ok = 0, negative = 1, bad_input = 2, resource = 3 };

enum class Format { plain, csv, json };

inline constexpr std::uint64_t default_node_budget = 100'000'000;

/// Parameters of one invocation; which fields matter depends on the command.
struct RunConfig {
    std::string command;
    std::string seed = "0";
    std::string elements;
    std::optional<std::uint64_t> count;
    std::optional<std::uint64_t> max_value;
    unsigned depth = 6;
    std::uint64_t modulus = 0;
    bool near = false;
    unsigned ell = 1;
    std::uint64_t max_element = 0;
    bool first_only = false;
    std::int64_t lambda = 0;
    std::uint64_t spacing = 1;
    std::size_t max_head_length = 3;
    std::uint64_t max_entry = 12;
    unsigned workers = 1;
    std::optional<std::uint64_t> budget;
    Format format = Format::plain;
};

using json = nlohmann::ordered_json;

namespace detail {

/// Integers above 2^53 are emitted as strings.
inline json number(std::uint64_t v)
{
    if (v > (std::uint64_t{1} << 53))
        return std::to_string(v);
    return v;
}

inline json number(std::int64_t v)
{
    if (v > (std::int64_t{1} << 53) || v < -(std::int64_t{1} << 53))
        return std::to_string(v);
    return v;
}

inline json numbers(std::span<const value_t> vs)
{
    json a = json::array();
    for (value_t v : vs)
        a.push_back(number(v));
    return a;
}

inline std::vector<value_t> parse_list(const std::string& text, const char* what)
{
    std::vector<value_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos)
            end = text.size();
        std::string_view tok(text.data() + pos, end - pos);
        while (!tok.empty() && tok.front() == ' ')
            tok.remove_prefix(1);
        while (!tok.empty() && tok.back() == ' ')
            tok.remove_suffix(1);
        value_t v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size())
            throw invalid_input(std::string(what) + ": '" + std::string(tok)
                                + "' is not a nonnegative integer");
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

inline std::string join(std::span<const value_t> vs, char sep)
{
    std::string s;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i)
            s += sep;
        s += std::to_string(vs[i]);
    }
    return s;
}

inline Bound bound_of(const RunConfig& c)
{
    if (c.count.has_value() == c.max_value.has_value())
        throw invalid_input("give exactly one of --count and --max-value");
    return c.count ? Bound::terms(*c.count) : Bound::up_to(*c.max_value);
}

inline std::uint64_t node_budget(const RunConfig& c)
{
    if (c.budget)
        return *c.budget;
    if (const char* env = std::getenv("STANLEY_NODE_BUDGET")) {
        std::uint64_t v = 0;
        const std::string_view s(env);
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw invalid_input("STANLEY_NODE_BUDGET must be a nonnegative integer");
        return v;
    }
    return default_node_budget;
}

inline void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

inline json certificate_json(const IndependenceCertificate& c)
{
    return json{{"independent", true},
                {"character", number(c.character)},
                {"chi", c.chi},
                {"repeat_factor", number(c.repeat_factor)},
                {"verified_depth", c.verified_depth}};
}

inline void print_certificate(std::ostream& out, const IndependenceCertificate& c)
{
    out << "independent up to depth " << c.verified_depth << '\n'
        << "character " << c.character << '\n'
        << "chi " << c.chi << '\n'
        << "repeat_factor " << c.repeat_factor << '\n';
}

inline json violation_json(const ModSetViolation& v)
{
    struct {
        json operator()(MissingZero) const { return {{"kind", "missing-zero"}}; }
        json operator()(OutOfRange o) const { return {{"kind", "out-of-range"}, {"element", number(o.element)}}; }
        json operator()(ApModWitness w) const
        {
            return {{"kind", "ap-mod-n"}, {"x", number(w.x)}, {"y", number(w.y)}, {"z", number(w.z)}};
        }
        json operator()(UncoveredResidue u) const
        {
            return {{"kind", "uncovered-residue"}, {"residue", number(u.residue)}};
        }
    } visitor;
    return std::visit(visitor, v);
}

inline const char* to_string(TailRule t) { return t == TailRule::power ? "power" : "tripling"; }

// ---------------------------------------------------------------------------

inline int cmd_gen(const RunConfig& c, std::ostream& out)
{
    const auto seq = generate(parse_list(c.seed, "--seed"), bound_of(c));
    if (c.format == Format::json) {
        emit(out, json{{"seed", numbers(seq.seed.elements())}, {"terms", numbers(seq.terms)}});
    } else {
        for (value_t v : seq.terms)
            out << v << '\n';
    }
    return ok;
}

inline int cmd_analyze(const RunConfig& c, std::ostream& out)
{
    if (c.depth < 1 || c.depth > 30)
        throw invalid_input("--depth must be in 1..30");
    const auto seq = generate(parse_list(c.seed, "--seed"), Bound::terms(std::uint64_t{1} << (c.depth + 1)));
    const auto rep = analyze_independence(seq, c.depth);
    if (rep.certificate) {
        if (c.format == Format::plain)
            print_certificate(out, *rep.certificate);
        else if (c.format == Format::csv)
            out << "character,chi,repeat_factor,verified_depth\n"
                << rep.certificate->character << ',' << rep.certificate->chi << ',' << rep.certificate->repeat_factor
                << ',' << rep.certificate->verified_depth << '\n';
        else
            emit(out, certificate_json(*rep.certificate));
        return ok;
    }
    const auto& v = *rep.violation;
    if (c.format == Format::json) {
        json jv{{"k", v.k}};
        jv["identity"] = v.index ? "translation" : "doubling";
        if (v.index)
            jv["index"] = number(*v.index);
        jv["expected"] = number(v.expected);
        jv["actual"] = number(v.actual);
        emit(out, json{{"independent", false}, {"verified_depth", c.depth}, {"violation", jv}});
    } else {
        out << "not independent at depth " << c.depth << ": ";
        if (v.index)
            out << "a_{2^" << v.k << "+" << *v.index << "} = " << v.actual << ", expected " << v.expected << '\n';
        else
            out << "a_{2^" << v.k << "} = " << v.actual << ", expected " << v.expected << '\n';
    }
    return negative;
}

inline int cmd_modset(const RunConfig& c, std::ostream& out)
{
    const auto elems = parse_list(c.elements, "--elements");
    if (c.modulus < 1)
        throw invalid_input("--modulus must be positive");
    const auto rep = c.near ? verify_near_modular(elems, c.modulus) : verify_modular(elems, c.modulus);
    if (c.format == Format::json) {
        json j{{"elements", numbers(elems)}, {"modulus", number(c.modulus)},
               {"check", c.near ? "near-modular" : "modular"}, {"verdict", stanley::to_string(rep.verdict)}};
        if (rep.violation)
            j["violation"] = violation_json(*rep.violation);
        emit(out, j);
    } else if (c.format == Format::csv) {
        out << "verdict,violation\n" << stanley::to_string(rep.verdict) << ','
            << (rep.violation ? describe(*rep.violation) : "") << '\n';
    } else {
        out << "verdict " << stanley::to_string(rep.verdict) << '\n';
        if (rep.violation)
            out << "violation " << describe(*rep.violation) << '\n';
    }
    return rep.ok() ? ok : negative;
}

inline int cmd_search(const RunConfig& c, std::ostream& out)
{
    SearchOptions opt;
    opt.ell = c.ell;
    opt.max_element = c.max_element;
    opt.node_budget = node_budget(c);
    opt.workers = c.workers;
    opt.first_only = c.first_only;
    const auto sets = search_near_modular(opt);
    if (c.format == Format::json) {
        json list = json::array();
        for (const auto& s : sets)
            list.push_back(numbers(s.elements));
        emit(out, json{{"ell", c.ell},
                       {"modulus", number(arith::pow3(c.ell + 1))},
                       {"size", std::uint64_t{1} << (c.ell + 1)},
                       {"max_element", number(c.max_element)},
                       {"sets", list}});
    } else if (c.format == Format::csv) {
        out << "index,elements\n";
        for (std::size_t i = 0; i < sets.size(); ++i)
            out << i << ',' << join(sets[i].elements, ' ') << '\n';
    } else {
        for (const auto& s : sets)
            out << join(s.elements, ',') << '\n';
    }
    return sets.empty() ? negative : ok;
}

inline json recipe_json(const CharacterPlan& plan)
{
    if (const auto* b = std::get_if<BasisRecipe>(&plan.recipe))
        return json{{"kind", "basis"}, {"head", numbers(b->head)}};
    const auto& f = std::get<FamilyRecipe>(plan.recipe);
    const auto set = family_set(f.level, f.family, f.shift);
    return json{{"kind", "family"},     {"level", f.level},  {"family", stanley::to_string(f.family)},
                {"shift", number(f.shift)}, {"set", numbers(set.elements)}, {"modulus", number(set.modulus)}};
}

inline std::string recipe_text(const CharacterPlan& plan)
{
    if (const auto* b = std::get_if<BasisRecipe>(&plan.recipe))
        return "basis head (" + join(b->head, ',') + ") with tail 3^k";
    const auto& f = std::get<FamilyRecipe>(plan.recipe);
    return std::string("family ") + stanley::to_string(f.family) + " level " + std::to_string(f.level) + " shift "
           + std::to_string(f.shift) + " with tail 3^(k+" + std::to_string(f.level + 1) + ")";
}

inline int cmd_character(const RunConfig& c, std::ostream& out)
{
    const auto plan = plan_character(c.lambda);
    const auto cert = verify_plan(plan, c.depth);
    if (c.format == Format::json) {
        emit(out, json{{"lambda", number(plan.target)}, {"recipe", recipe_json(plan)}, {"certificate", certificate_json(cert)}});
    } else if (c.format == Format::csv) {
        out << "lambda,recipe,character,chi,repeat_factor,verified_depth\n"
            << plan.target << ',' << recipe_text(plan) << ',' << cert.character << ',' << cert.chi << ','
            << cert.repeat_factor << ',' << cert.verified_depth << '\n';
    } else {
        out << "lambda " << plan.target << '\n' << "recipe " << recipe_text(plan) << '\n';
        print_certificate(out, cert);
    }
    return ok;
}

inline int cmd_coverage(const RunConfig& c, std::ostream& out)
{
    const auto map = residue_coverage(c.modulus == 0 ? 486 : c.modulus);
    const auto unc = map.uncovered();
    if (c.format == Format::json) {
        json rows = json::array();
        for (const auto& e : map.entries)
            rows.push_back(json{{"residue", number(e.residue)},
                                {"source", e.source ? json(to_string(*e.source)) : json(nullptr)}});
        emit(out, json{{"modulus", number(map.modulus)}, {"uncovered", numbers(unc)}, {"residues", rows}});
    } else if (c.format == Format::csv) {
        out << "residue,source\n";
        for (const auto& e : map.entries)
            out << e.residue << ',' << (e.source ? to_string(*e.source) : "uncovered") << '\n';
    } else {
        out << "modulus " << map.modulus << '\n'
            << "covered " << map.entries.size() - unc.size() << " of " << map.entries.size() << " even residues\n"
            << "uncovered " << join(unc, ',') << '\n';
    }
    return ok;
}

inline json samples_json(const std::vector<GrowthSample>& ss)
{
    json a = json::array();
    for (const auto& s : ss)
        a.push_back(json{{"n", number(s.n)},
                         {"value", number(s.value)},
                         {"ratio", s.ratio},
                         {"running_min", s.running_min},
                         {"running_max", s.running_max}});
    return a;
}

inline int cmd_growth(const RunConfig& c, std::ostream& out)
{
    const auto seq = generate(parse_list(c.seed, "--seed"), bound_of(c));
    const auto rep = growth_stats(seq.terms, c.spacing);
    if (c.format == Format::json) {
        emit(out, json{{"seed", numbers(seq.seed.elements())},
                       {"length", number(static_cast<std::uint64_t>(seq.terms.size()))},
                       {"spacing", number(rep.spacing)},
                       {"alpha_estimate", rep.alpha_estimate},
                       {"liminf_estimate", rep.liminf_estimate},
                       {"samples", samples_json(rep.samples)},
                       {"power_samples", samples_json(rep.power_samples)}});
    } else if (c.format == Format::csv) {
        std::ostringstream line;
        line.precision(17);
        out << "index,value,ratio\n";
        for (const auto& s : rep.samples) {
            line.str("");
            line << s.n << ',' << s.value << ',' << s.ratio << '\n';
            out << line.str();
        }
    } else {
        std::ostringstream line;
        line.precision(17);
        line << "terms " << seq.terms.size() << "\nalpha_estimate " << rep.alpha_estimate << "\nliminf_estimate "
             << rep.liminf_estimate << '\n';
        for (const auto& s : rep.samples)
            line << s.n << ' ' << s.value << ' ' << s.ratio << '\n';
        out << line.str();
    }
    return ok;
}

inline int cmd_explore(const RunConfig& c, std::ostream& out)
{
    ExploreOptions opt;
    opt.max_head_length = c.max_head_length;
    opt.max_entry = c.max_entry;
    opt.depth = c.depth;
    opt.workers = c.workers;
    opt.candidate_budget = node_budget(c);
    const auto found = explore_basic_characters(opt);
    if (c.format == Format::json) {
        json a = json::array();
        for (const auto& e : found)
            a.push_back(json{{"head", numbers(e.head)},
                             {"tail", to_string(e.tail)},
                             {"character", number(e.certificate.character)},
                             {"chi", e.certificate.chi},
                             {"repeat_factor", number(e.certificate.repeat_factor)},
                             {"verified_depth", e.certificate.verified_depth}});
        emit(out, json{{"bases", a}});
    } else {
        if (c.format == Format::csv)
            out << "head,tail,character,chi,repeat_factor\n";
        const char sep = c.format == Format::csv ? ',' : ' ';
        for (const auto& e : found)
            out << join(e.head, ' ') << sep << to_string(e.tail) << sep << e.certificate.character << sep
                << e.certificate.chi << sep << e.certificate.repeat_factor << '\n';
    }
    return ok;
}

inline int cmd_families(const RunConfig& c, std::ostream& out)
{
    json rows = json::array();
    if (c.format == Format::csv)
        out << "level,family,modulus,shift_step,elements\n";
    for (unsigned i = family_min_level; i <= family_max_level; ++i) {
        for (Family f : {Family::A, Family::B}) {
            const auto s = family_set(i, f, 0);
            if (c.format == Format::json)
                rows.push_back(json{{"level", i},
                                    {"family", stanley::to_string(f)},
                                    {"modulus", number(s.modulus)},
                                    {"shift_step", number(s.modulus)},
                                    {"character_base", number(family_base_character(i, f))},
                                    {"elements", numbers(s.elements)}});
            else if (c.format == Format::csv)
                out << i << ',' << stanley::to_string(f) << ',' << s.modulus << ',' << s.modulus << ','
                    << join(s.elements, ' ') << '\n';
            else
                out << stanley::to_string(f) << i << " mod " << s.modulus << ": " << join(s.elements, ',') << '\n';
        }
    }
    if (c.format == Format::json)
        emit(out, json{{"families", rows}});
    return ok;
}

} // namespace detail

/// Runs one command. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    CLI::App app{"Stanley sequence toolkit: greedy 3-AP-free sequences, modular sets, characters", "stanley"};
    app.require_subcommand(1);

    std::map<std::string, Format> formats{{"plain", Format::plain}, {"csv", Format::csv}, {"json", Format::json}};
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "plain | csv | json")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    };
    auto add_bound = [&](CLI::App* sub) {
        sub->add_option("--count", cfg.count, "number of terms");
        sub->add_option("--max-value", cfg.max_value, "largest admissible term value");
    };

    auto* gen = app.add_subcommand("gen", "greedy extension of a seed");
    gen->add_option("--seed", cfg.seed, "comma-separated seed containing 0")->required();
    add_bound(gen);
    add_format(gen);

    auto* analyze = app.add_subcommand("analyze", "independence certificate of S(seed)");
    analyze->add_option("--seed", cfg.seed)->required();
    analyze->add_option("--depth", cfg.depth, "largest block level k to check");
    add_format(analyze);

    auto* modset = app.add_subcommand("modset", "verify a modular or near-modular set");
    modset->add_option("--elements", cfg.elements)->required();
    modset->add_option("--modulus", cfg.modulus)->required();
    modset->add_flag("--near", cfg.near, "near-modular check (elements may exceed the modulus)");
    add_format(modset);

    auto* search = app.add_subcommand("search", "exhaustive search for near-modular sets mod 3^(ell+1)");
    search->add_option("--ell", cfg.ell)->required();
    search->add_option("--max-element", cfg.max_element)->required();
    search->add_flag("--first", cfg.first_only, "stop at the first set found");
    search->add_option("--workers", cfg.workers);
    search->add_option("--budget", cfg.budget, "node budget (default $STANLEY_NODE_BUDGET or 1e8)");
    add_format(search);

    auto* character = app.add_subcommand("character", "plan, realize and verify an even character");
    character->add_option("--lambda", cfg.lambda)->required();
    character->add_option("--depth", cfg.depth);
    add_format(character);

    auto* coverage = app.add_subcommand("coverage", "even residues covered by the constructions");
    coverage->add_option("--modulus", cfg.modulus, "positive multiple of 6 (default 486)");
    add_format(coverage);

    auto* growth = app.add_subcommand("growth", "a_n / n^(log2 3) statistics");
    growth->add_option("--seed", cfg.seed)->required();
    add_bound(growth);
    growth->add_option("--spacing", cfg.spacing);
    add_format(growth);

    auto* explore = app.add_subcommand("explore", "characters of small basic sequences");
    explore->add_option("--max-head-length", cfg.max_head_length);
    explore->add_option("--max-entry", cfg.max_entry);
    explore->add_option("--depth", cfg.depth);
    explore->add_option("--workers", cfg.workers);
    explore->add_option("--budget", cfg.budget, "candidate budget");
    add_format(explore);

    auto* families = app.add_subcommand("families", "dump the A/B near-modular family table");
    add_format(families);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return bad_input;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        if (gen->parsed())
            return detail::cmd_gen(cfg, out);
        if (analyze->parsed())
            return detail::cmd_analyze(cfg, out);
        if (modset->parsed())
            return detail::cmd_modset(cfg, out);
        if (search->parsed())
            return detail::cmd_search(cfg, out);
        if (character->parsed())
            return detail::cmd_character(cfg, out);
        if (coverage->parsed())
            return detail::cmd_coverage(cfg, out);
        if (growth->parsed())
            return detail::cmd_growth(cfg, out);
        if (explore->parsed())
            return detail::cmd_explore(cfg, out);
        if (families->parsed())
            return detail::cmd_families(cfg, out);
    } catch (const invalid_seed& e) {
        err << "error: " << e.what() << '\n';
        if (e.witness())
            err << "witness " << to_string(*e.witness()) << '\n';
        return bad_input;
    } catch (const invalid_input& e) {
        err << "error: " << e.what() << '\n';
        return bad_input;
    } catch (const resource_error& e) {
        err << "error: " << e.what() << '\n';
        return resource;
    } catch (const not_covered& e) {
        err << e.what() << '\n';
        return negative;
    } catch (const verification_error& e) {
        err << "verification failed: " << e.what() << '\n';
        return negative;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return resource;
    }
    return bad_input;
}

} // namespace stanley::cli
