#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "astrocity/builders.hpp"
#include "astrocity/crs.hpp"
#include "astrocity/document.hpp"
#include "astrocity/errors.hpp"
#include "astrocity/extension.hpp"
#include "astrocity/recipe.hpp"
#include "astrocity/validate.hpp"

using namespace astrocity;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationErrors = 1;
constexpr int kExitUsage = 2;

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IoError", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("IoError", "cannot write '" + path + "'");
    out << content;
}

void print_issues(const std::vector<Issue>& issues, bool as_json) {
    if (as_json) {
        nlohmann::json report = nlohmann::json::array();
        for (const auto& i : issues)
            report.push_back({{"code", i.code},
                              {"severity", i.severity == Severity::Error ? "error" : "warning"},
                              {"object", i.object_id},
                              {"path", i.path},
                              {"message", i.message}});
        std::cout << report.dump(2) << "\n";
        return;
    }
    for (const auto& i : issues) {
        std::cout << (i.severity == Severity::Error ? "ERROR   " : "warning ") << i.code;
        if (!i.object_id.empty()) std::cout << " [" << i.object_id << "]";
        if (!i.path.empty()) std::cout << " at " << i.path;
        std::cout << ": " << i.message << "\n";
    }
}

std::optional<std::uint64_t> effective_seed(const std::optional<std::uint64_t>& flag_seed) {
    if (flag_seed) return flag_seed;
    if (const char* env = std::getenv("ASTROCITY_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw Error("UsageError", "ASTROCITY_SEED is not an unsigned integer");
        }
    }
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CityJSON toolkit for celestial-body surface objects and logical spaces"};
    app.require_subcommand(1);

    // extension emit
    auto* ext_cmd = app.add_subcommand("extension", "extension schema operations");
    ext_cmd->require_subcommand(1);
    auto* emit_cmd = ext_cmd->add_subcommand("emit", "emit the extension schema");
    std::string emit_out;
    emit_cmd->add_option("-o,--output", emit_out, "output file (stdout when omitted)");

    // project
    auto* project_cmd = app.add_subcommand("project", "geographic <-> projected conversion");
    std::string project_crs;
    double opt_lat = 0.0, opt_lon = 0.0, opt_x = 0.0, opt_y = 0.0;
    bool do_inverse = false;
    project_cmd->add_option("--crs", project_crs, "authority:code, e.g. IAU_2015:30185")
        ->required();
    auto* lat_opt = project_cmd->add_option("--lat", opt_lat, "latitude, degrees");
    auto* lon_opt = project_cmd->add_option("--lon", opt_lon, "longitude, degrees");
    auto* x_opt = project_cmd->add_option("--x", opt_x, "easting, metres");
    auto* y_opt = project_cmd->add_option("--y", opt_y, "northing, metres");
    project_cmd->add_flag("--inverse", do_inverse, "convert projected to geographic");

    // build
    auto* build_cmd = app.add_subcommand("build", "build a document from a recipe");
    std::string recipe_path, build_out;
    std::optional<std::uint64_t> seed_flag;
    build_cmd->add_option("recipe", recipe_path, "recipe file")->required();
    build_cmd->add_option("-o,--output", build_out, "override the recipe output path");
    std::uint64_t seed_value = 0;
    auto* seed_opt = build_cmd->add_option("--seed", seed_value, "id generation seed");

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "validate a CityJSON document");
    std::string validate_path, extension_schema, report_format;
    bool strict = false;
    validate_cmd->add_option("file", validate_path, "CityJSON file")->required();
    validate_cmd->add_option("--extension", extension_schema,
                             "extension schema file to cross-check");
    validate_cmd->add_flag("--strict", strict, "treat unknown attributes as errors");
    validate_cmd->add_option("--report", report_format, "issue report format: json");

    // upgrade
    auto* upgrade_cmd = app.add_subcommand("upgrade", "upgrade a 1.0 document to 2.0");
    std::string upgrade_in, upgrade_out;
    upgrade_cmd->add_option("file", upgrade_in, "CityJSON 1.0 file")->required();
    upgrade_cmd->add_option("-o,--output", upgrade_out, "output file (stdout when omitted)");

    // info
    auto* info_cmd = app.add_subcommand("info", "summarize a CityJSON document");
    std::string info_path;
    info_cmd->add_option("file", info_path, "CityJSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*emit_cmd) {
            const std::string schema = ext::emit_extension_schema(ext::builtin_registry());
            if (emit_out.empty())
                std::cout << schema;
            else
                spill_file(emit_out, schema);
            return kExitOk;
        }

        if (*project_cmd) {
            const crs::ProjectionSpec spec = crs::builtin_crs(project_crs);
            if (do_inverse) {
                if (!*x_opt || !*y_opt)
                    throw Error("UsageError", "--inverse needs --x and --y");
                const auto ll = crs::inverse(spec, opt_x, opt_y);
                std::printf("%.7f %.7f\n", ll.lat, ll.lon);
            } else {
                if (!*lat_opt || !*lon_opt)
                    throw Error("UsageError", "forward projection needs --lat and --lon");
                const auto xy = crs::forward(spec, opt_lat, opt_lon);
                std::printf("%.4f %.4f\n", xy.x, xy.y);
            }
            return kExitOk;
        }

        if (*build_cmd) {
            if (*seed_opt) seed_flag = seed_value;
            auto result = recipe::run_recipe_file(recipe_path, effective_seed(seed_flag));
            const std::string out_path =
                build_out.empty() ? result.output_path : build_out;
            if (out_path.empty())
                throw Error("UsageError", "recipe declares no output and -o was not given");
            spill_file(out_path, cj::write_document(result.doc));

            const auto issues =
                validate::validate_all(result.doc, ext::builtin_registry());
            print_issues(issues, false);
            std::cout << "wrote " << out_path << " (" << result.doc.objects.size()
                      << " objects)\n";
            return has_errors(issues) ? kExitValidationErrors : kExitOk;
        }

        if (*validate_cmd) {
            const cj::CityDocument doc = cj::read_document(slurp_file(validate_path));
            const ext::ExtensionRegistry registry = ext::builtin_registry();

            // extension checks apply when the document declares the
            // extension, uses "+"-prefixed types, or a schema was given
            bool wants_extension = !extension_schema.empty() ||
                                   doc.extensions.count(registry.extension_name) > 0;
            for (const auto& [id, obj] : doc.objects)
                wants_extension |= !obj.object_type.empty() && obj.object_type.front() == '+';

            std::vector<Issue> issues = validate::validate_core(doc);
            if (wants_extension) {
                const auto ext_issues = validate::validate_extension(doc, registry, strict);
                issues.insert(issues.end(), ext_issues.begin(), ext_issues.end());
            }
            const auto solid_issues = validate::validate_solids(doc);
            issues.insert(issues.end(), solid_issues.begin(), solid_issues.end());

            if (!extension_schema.empty() &&
                slurp_file(extension_schema) != ext::emit_extension_schema(registry))
                issues.push_back({"EXT_SCHEMA_MISMATCH", Severity::Error, "", "extensions",
                                  "schema file does not match the built-in " +
                                      registry.extension_name + " registry"});

            print_issues(issues, report_format == "json");
            if (report_format != "json")
                std::cout << (has_errors(issues) ? "INVALID" : "VALID") << " ("
                          << errors_only(issues).size() << " errors, "
                          << issues.size() - errors_only(issues).size() << " warnings)\n";
            return has_errors(issues) ? kExitValidationErrors : kExitOk;
        }

        if (*upgrade_cmd) {
            const cj::CityDocument doc = cj::read_document(slurp_file(upgrade_in));
            const std::string text = cj::write_document(cj::upgrade_document(doc));
            if (upgrade_out.empty())
                std::cout << text;
            else
                spill_file(upgrade_out, text);
            return kExitOk;
        }

        if (*info_cmd) {
            const cj::CityDocument doc = cj::read_document(slurp_file(info_path));
            std::map<std::string, std::size_t> counts;
            for (const auto& [id, obj] : doc.objects) counts[obj.object_type]++;
            std::cout << "version:  " << doc.version << "\n"
                      << "crs:      " << doc.reference_system_url << "\n"
                      << "vertices: " << doc.vertices.size() << "\n"
                      << "objects:  " << doc.objects.size() << "\n";
            for (const auto& [type, count] : counts)
                std::cout << "  " << type << ": " << count << "\n";
            for (const auto& [name, ref] : doc.extensions)
                std::cout << "extension " << name << " " << ref.version << " (" << ref.url
                          << ")\n";
            return kExitOk;
        }
    } catch (const Error& e) {
        std::cerr << "astrocity: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "astrocity: " << e.what() << "\n";
        return kExitUsage;
    }

    return kExitUsage;
}
