#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mahler/jobspec.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mahler::InputError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int finish(const mahler::RunResult& r, const std::string& out_path) {
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot write file: " << out_path << "\n";
            return 1;
        }
        out << r.output << "\n";
    } else if (!r.output.empty()) {
        std::cout << r.output << "\n";
    }
    if (!r.diagnostics.empty()) std::cerr << r.diagnostics << "\n";
    return r.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact solver for linear Mahler equations"};
    app.require_subcommand(1);

    std::string input_path, out_path, basis_path, format;
    long entry_i = 0, entry_j = 1;

    auto* solve = app.add_subcommand("solve", "compute a basis of solutions");
    solve->add_option("--input", input_path, "job JSON file")->required();
    solve->add_option("--out", out_path, "result file (stdout when omitted)");
    solve->add_option("--format", format, "text|json");

    auto* entry = app.add_subcommand("entry-eq", "derive a Mahler equation for one entry of P");
    entry->add_option("--input", input_path, "job JSON file")->required();
    entry->add_option("--i", entry_i, "row index (0-based)");
    entry->add_option("--j", entry_j, "column index (0-based)");
    entry->add_option("--out", out_path, "result file (stdout when omitted)");
    entry->add_option("--format", format, "text|json");

    auto* verify = app.add_subcommand("verify", "verify a basis against its equation");
    verify->add_option("--input", input_path, "job JSON file")->required();
    verify->add_option("--basis", basis_path, "basis JSON file")->required();
    verify->add_option("--out", out_path, "report file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        mahler::JobSpec spec = mahler::parse_job(read_file(input_path));
        if (!format.empty()) spec.format = format;
        std::string basis_json;
        if (solve->parsed()) {
            spec.output = "basis";
        } else if (entry->parsed()) {
            spec.output = "entry-equations";
            if (entry->count("--i")) spec.entry_i = entry_i;
            if (entry->count("--j")) spec.entry_j = entry_j;
        } else if (verify->parsed()) {
            spec.output = "verify";
            basis_json = read_file(basis_path);
        }
        return finish(mahler::run_and_emit(spec, basis_json), out_path);
    } catch (const mahler::UnsupportedFieldError& e) {
        std::cerr << "unsupported extension: " << e.what() << "\n";
        return 2;
    } catch (const mahler::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
