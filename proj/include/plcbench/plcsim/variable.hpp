// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plcbench/common/time.hpp"

namespace plcbench::plcsim {

/// Network publish attribute of a controller variable.
enum class Publish { None, Input, Output };

const char* to_string(Publish publish) noexcept;
Publish parse_publish(std::string_view text);

/// LREAL controller variable. Exposed to FINS as 4 DM words starting at
/// `dm_address`, most significant word first.
struct Variable {
  std::string name;
  double value = 0.0;
  Publish publish = Publish::None;
  std::uint16_t dm_address = 0;
};

struct CopyRule {
  std::string source;
  std::string destination;
};

struct ScanConfig {
  Duration task_period = std::chrono::milliseconds{1};
  /// Executed in order once per scan.
  std::vector<CopyRule> copy_rules;
};

/// The controller's variables plus their DM word image. Construction
/// validates names and DM ranges and zeroes every value.
class VariableTable {
 public:
  explicit VariableTable(std::vector<Variable> variables);

  [[nodiscard]] const std::vector<Variable>& variables() const { return variables_; }
  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const;
  [[nodiscard]] const Variable& at(std::size_t index) const { return variables_.at(index); }

  [[nodiscard]] double value(std::string_view name) const;
  void set_value(std::string_view name, double value);
  void set_value(std::size_t index, double value) { variables_.at(index).value = value; }

  /// True when every word in [address, address + count) belongs to a variable.
  [[nodiscard]] bool mapped(std::uint16_t address, std::uint32_t count) const;
  [[nodiscard]] std::uint16_t read_word(std::uint16_t address) const;
  void write_word(std::uint16_t address, std::uint16_t word);

 private:
  struct WordRef {
    std::size_t variable;
    unsigned word;  // 0 = most significant
  };
  [[nodiscard]] std::optional<WordRef> locate(std::uint16_t address) const;

  std::vector<Variable> variables_;
  std::map<std::uint16_t, std::size_t> by_base_;
};

/// CIn at DM0 (input published), COut at DM4 (output published).
std::vector<Variable> two_variable_fixture();
/// 1 ms task period copying CIn into COut.
ScanConfig copy_fixture_scan();

}  // namespace plcbench::plcsim
