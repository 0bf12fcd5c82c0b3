#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ionmux/config.hpp"

namespace ionmux {

std::string_view tool_version();

/// Subcommands accepted by run().
const std::vector<std::string>& command_names();

using Cell = std::variant<double, std::int64_t, std::string>;

/// One output file worth of tabular data.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Computes the tables of `command` for a resolved config. Pure.
std::vector<Table> execute(std::string_view command, const RunConfig& config);

enum class OutputFormat { Csv, Json };

/// CSV: provenance comment block, header row, %.12g numbers, LF endings.
std::string render_csv(const Table& table, std::string_view command, const RunConfig& config);
std::string render_json(const Table& table, std::string_view command, const RunConfig& config);

/// Writes via a temporary file in the same directory and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Runs `command` and writes one file per table into `out_dir`.
std::vector<std::filesystem::path> run(std::string_view command, const RunConfig& config,
                                       const std::filesystem::path& out_dir, OutputFormat format);

/// Machine-readable error record (one JSON line).
std::string error_record(const std::exception& e);

/// Entry point of the command-line tool.
int cli_main(int argc, char** argv);

}  // namespace ionmux
