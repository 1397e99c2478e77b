// Batch front end: reads JSON specs, runs the library operations, emits JSON
// or text reports. Exit codes: 0 success, 1 semantic negative (empty subshift
// or failed verification), 2 unknown verdict / missing exact oracle,
// 3 input or schema error, 4 capacity exceeded.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sft/json_io.hpp"

using namespace sft;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw input_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw input_error("cannot parse '" + path + "': " + e.what());
    }
    return j;
}

struct Output {
    std::string path;   // empty = stdout
    std::string format; // "json" or "text"

    void write(const json& payload, const std::string& text) const {
        std::string body = format == "json" ? payload.dump(2) + "\n" : text;
        if (path.empty()) {
            std::cout << body;
        } else {
            std::ofstream out(path, std::ios::binary);
            if (!out)
                throw input_error("cannot write '" + path + "'");
            out << body;
        }
    }
};

std::string cert_text(const json& j) {
    std::ostringstream os;
    os << "verdict: " << j.at("verdict").get<std::string>() << "\n";
    if (j.contains("radius"))
        os << "radius: " << j.at("radius").get<int>() << "\n";
    if (j.contains("witness"))
        os << "witness: " << j.at("witness").dump() << "\n";
    return os.str();
}

std::string patch_text(const json& j) {
    std::ostringstream os;
    os << "config: " << j.at("config").dump() << "\n";
    os << "radius: " << j.at("radius").get<int>() << "\n";
    for (const auto& e : j.at("cells"))
        os << (e.at("cell").get<std::string>().empty() ? "1" : e.at("cell").get<std::string>())
           << " -> " << e.at("symbol").get<std::string>() << "\n";
    if (j.contains("verification"))
        os << "verification: " << (j.at("verification").at("ok").get<bool>() ? "ok" : "failed")
           << "\n";
    return os.str();
}

std::string sft_text(const json& j) {
    std::ostringstream os;
    os << "alphabet:";
    for (const auto& s : j.at("alphabet"))
        os << " " << s.get<std::string>();
    os << "\nforbidden patterns: " << j.at("forbidden").size() << "\n";
    return os.str();
}

int exit_for(const EmptinessCertificate& cert) {
    switch (cert.verdict) {
    case EmptinessCertificate::Verdict::nonempty_periodic:
        return 0;
    case EmptinessCertificate::Verdict::empty:
        return 1;
    case EmptinessCertificate::Verdict::unknown:
        return 2;
    }
    return 3;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"subshifts of finite type on finitely generated groups"};
    app.require_subcommand(1);

    std::string format = "text";
    std::string out_path;
    app.add_option("--format", format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("-o,--output", out_path, "write the report to a file");

    // check-empty
    auto* cmd_empty = app.add_subcommand("check-empty", "emptiness certificate for an SFT");
    std::string empty_sft;
    int empty_budget = 8;
    cmd_empty->add_option("sft", empty_sft)->required();
    cmd_empty->add_option("--budget", empty_budget, "semi-oracle budget");

    // patches
    auto* cmd_patches = app.add_subcommand("patches", "admissible ball patterns");
    std::string patches_sft;
    int patches_radius = 1;
    cmd_patches->add_option("sft", patches_sft)->required();
    cmd_patches->add_option("--radius", patches_radius)->required();

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "check a configuration against an SFT");
    std::string verify_sft, verify_cfg;
    int verify_radius = 3;
    cmd_verify->add_option("sft", verify_sft)->required();
    cmd_verify->add_option("config", verify_cfg)->required();
    cmd_verify->add_option("--radius", verify_radius)->required();

    // synthesize
    auto* cmd_synth = app.add_subcommand("synthesize", "construct a point of the subshift");
    std::string synth_method, synth_sft;
    int synth_radius = 3;
    int synth_budget = 8;
    cmd_synth->add_option("method", synth_method)
        ->required()
        ->check(CLI::IsMember({"greedy", "domino", "periodic"}));
    cmd_synth->add_option("sft", synth_sft)->required();
    cmd_synth->add_option("--radius", synth_radius, "radius of the emitted patch");
    cmd_synth->add_option("--budget", synth_budget, "quotient bound for periodic search");

    // transfer
    auto* cmd_transfer = app.add_subcommand("transfer", "move subshifts between groups");
    auto* tr_pull = cmd_transfer->add_subcommand("pullback", "pull back along an epimorphism");
    std::string pull_hom, pull_sft, pull_cfg;
    int pull_radius = 3;
    tr_pull->add_option("hom", pull_hom)->required();
    tr_pull->add_option("sft", pull_sft)->required();
    tr_pull->add_option("--config", pull_cfg, "also pull back a configuration");
    tr_pull->add_option("--radius", pull_radius);

    auto* tr_free = cmd_transfer->add_subcommand("free-ext", "free extension along an embedding");
    std::string free_hom, free_sft;
    tr_free->add_option("hom", free_hom)->required();
    tr_free->add_option("sft", free_sft)->required();

    auto* tr_hb = cmd_transfer->add_subcommand("higher-block", "finite-index recoding");
    std::string hb_mode, hb_fid, hb_cfg, hb_base;
    int hb_radius = 3;
    tr_hb->add_option("mode", hb_mode)->required()->check(CLI::IsMember({"encode", "decode"}));
    tr_hb->add_option("data", hb_fid)->required();
    tr_hb->add_option("config", hb_cfg)->required();
    tr_hb->add_option("--radius", hb_radius);
    tr_hb->add_option("--base-alphabet", hb_base, "comma-separated symbols (decode)");

    auto* tr_overlay = cmd_transfer->add_subcommand("overlay", "bounded-action overlay");
    std::string ov_action, ov_sft;
    tr_overlay->add_option("action", ov_action)->required();
    tr_overlay->add_option("sft", ov_sft)->required();

    // walk
    auto* cmd_walk = app.add_subcommand("walk", "follow displacement arrows");
    std::string walk_action, walk_cfg, walk_word;
    cmd_walk->add_option("action", walk_action)->required();
    cmd_walk->add_option("config", walk_cfg)->required();
    cmd_walk->add_option("word", walk_word)->required();

    // let --format / -o appear after any (nested) subcommand
    for (CLI::App* sub : {cmd_empty, cmd_patches, cmd_verify, cmd_synth, cmd_transfer, tr_pull,
                          tr_free, tr_hb, tr_overlay, cmd_walk})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);
    Output out{out_path, format};

    if (*cmd_empty) {
        Sft x = io::sft_from_json(load_json(empty_sft));
        EmptinessCertificate cert = emptiness(x, empty_budget);
        json j = io::certificate_to_json(cert, x);
        out.write(j, cert_text(j));
        return exit_for(cert);
    }

    if (*cmd_patches) {
        Sft x = io::sft_from_json(load_json(patches_sft));
        auto patches = admissible_patches(x, patches_radius);
        json j;
        j["spec"] = 1;
        j["radius"] = patches_radius;
        j["count"] = patches.size();
        json arr = json::array();
        for (const Pattern& p : patches)
            arr.push_back(io::pattern_to_json(p, x.alphabet()));
        j["patches"] = arr;
        std::ostringstream text;
        text << "count: " << patches.size() << "\n";
        for (const Pattern& p : patches) {
            for (std::size_t i = 0; i < p.cells().size(); ++i)
                text << (i ? " " : "") << x.alphabet()[static_cast<std::size_t>(p.cells()[i][0])];
            text << "\n";
        }
        out.write(j, text.str());
        return 0;
    }

    if (*cmd_verify) {
        Sft x = io::sft_from_json(load_json(verify_sft));
        LazyConfiguration c = io::config_from_json(load_json(verify_cfg));
        if (!(c.group() == x.group()))
            throw input_error("configuration and subshift live on different groups");
        VerifyResult res = verify_configuration(x, c, verify_radius);
        json j;
        j["spec"] = 1;
        j["ok"] = res.ok;
        j["radius"] = verify_radius;
        std::ostringstream text;
        if (res.ok) {
            text << "ok\n";
        } else {
            j["violation_translate"] = res.translate.letters;
            j["violation_pattern"] = res.pattern_index;
            text << "violation at '" << res.translate.letters << "' (pattern "
                 << res.pattern_index << ")\n";
        }
        out.write(j, text.str());
        return res.ok ? 0 : 1;
    }

    if (*cmd_synth) {
        Sft x = io::sft_from_json(load_json(synth_sft));
        std::optional<LazyConfiguration> point;
        if (synth_method == "greedy") {
            auto nn = NearestNeighborTreeSft::from_sft(x);
            if (nn) {
                point = greedy_tree_point(*nn);
            } else {
                NnRecode rc = nn_recode(x, x.window_radius());
                point = decoded_greedy_point(rc, x.alphabet());
            }
        } else if (synth_method == "domino") {
            point = domino_guided_point(x).config;
        } else {
            point = periodic_point_search(x, synth_budget);
            if (!point) {
                json j;
                j["spec"] = 1;
                j["found"] = false;
                out.write(j, "no periodic point within the budget\n");
                return 1;
            }
        }
        json j = io::patch_to_json(*point, synth_radius, &x);
        out.write(j, patch_text(j));
        return j.at("verification").at("ok").get<bool>() ? 0 : 1;
    }

    if (*tr_pull) {
        KernelData kd = io::kernel_from_json(load_json(pull_hom));
        Sft x = io::sft_from_json(load_json(pull_sft));
        Sft y = pullback_sft(kd, x);
        json yj = io::sft_to_json(y);
        if (pull_cfg.empty()) {
            out.write(yj, sft_text(yj));
            return 0;
        }
        LazyConfiguration c = io::config_from_json(load_json(pull_cfg));
        LazyConfiguration pulled = pullback_config(kd.hom(), c);
        json j;
        j["spec"] = 1;
        j["sft"] = yj;
        j["patch"] = io::patch_to_json(pulled, pull_radius, &y);
        out.write(j, sft_text(yj) + patch_text(j.at("patch")));
        return 0;
    }

    if (*tr_free) {
        Homomorphism embed = io::hom_from_json(load_json(free_hom));
        Sft x = io::sft_from_json(load_json(free_sft));
        json j = io::sft_to_json(free_extension_sft(embed, x));
        out.write(j, sft_text(j));
        return 0;
    }

    if (*tr_hb) {
        FiniteIndexData fid = io::finite_index_from_json(load_json(hb_fid));
        LazyConfiguration c = io::config_from_json(load_json(hb_cfg));
        LazyConfiguration moved =
            hb_mode == "encode"
                ? higher_block_encode(fid, c)
                : higher_block_decode(fid, c,
                                      hb_base.empty()
                                          ? throw input_error(
                                                "--base-alphabet is required for decoding")
                                          : split_csv(hb_base));
        json j = io::patch_to_json(moved, hb_radius, nullptr);
        out.write(j, patch_text(j));
        return 0;
    }

    if (*tr_overlay) {
        io::ActionSpec spec = io::action_from_json(load_json(ov_action));
        Sft x = io::sft_from_json(load_json(ov_sft));
        DisplacementAlphabet alpha = spec.alphabet();
        Sft t = build_T_sft(spec.space, alpha, spec.relator_set());
        Sft overlay = overlay_sft(t, alpha, x);
        json j;
        j["spec"] = 1;
        j["t_sft"] = io::sft_to_json(t);
        j["overlay"] = io::sft_to_json(overlay);
        out.write(j, "t " + sft_text(j.at("t_sft")) + "overlay " + sft_text(j.at("overlay")));
        return 0;
    }

    if (*cmd_walk) {
        io::ActionSpec spec = io::action_from_json(load_json(walk_action));
        DisplacementAlphabet alpha = spec.alphabet();
        LazyConfiguration c = io::config_from_json(load_json(walk_cfg));
        if (c.alphabet() != alpha.symbol_names())
            throw input_error("configuration alphabet does not match the displacement alphabet");
        Word end = walk_phi(alpha, Word{}, c, Word(walk_word));
        json j;
        j["spec"] = 1;
        j["endpoint"] = end.letters;
        out.write(j, (end.empty() ? std::string("1") : end.letters) + "\n");
        return 0;
    }

    return 3;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const capacity_error& e) {
        std::cerr << "capacity: " << e.what() << "\n";
        return 4;
    } catch (const oracle_error& e) {
        std::cerr << "no exact oracle: " << e.what() << "\n";
        return 2;
    } catch (const emptiness_error& e) {
        std::cerr << "empty: " << e.what() << "\n";
        return 1;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const decode_error& e) {
        std::cerr << "decode error: " << e.what() << "\n";
        return 3;
    } catch (const contract_error& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
