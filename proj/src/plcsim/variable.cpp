// SPDX-License-Identifier: Apache-2.0

#include "plcbench/plcsim/variable.hpp"

#include <set>

#include "plcbench/common/bytes.hpp"
#include "plcbench/common/error.hpp"

namespace plcbench::plcsim {

namespace {
constexpr unsigned kWordsPerLreal = 4;
}

const char* to_string(Publish publish) noexcept {
  switch (publish) {
    case Publish::None: return "none";
    case Publish::Input: return "input";
    case Publish::Output: return "output";
  }
  return "none";
}

Publish parse_publish(std::string_view text) {
  if (text == "input" || text == "in") return Publish::Input;
  if (text == "output" || text == "out") return Publish::Output;
  if (text == "none" || text.empty()) return Publish::None;
  throw ConfigError("unknown publish attribute '" + std::string(text) + "'");
}

VariableTable::VariableTable(std::vector<Variable> variables) : variables_(std::move(variables)) {
  std::set<std::string, std::less<>> names;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    auto& v = variables_[i];
    if (v.name.empty()) {
      throw ConfigError("variable with empty name");
    }
    if (!names.insert(v.name).second) {
      throw ConfigError("duplicate variable name '" + v.name + "'");
    }
    if (v.dm_address > 0xFFFF - (kWordsPerLreal - 1)) {
      throw ConfigError("variable '" + v.name + "' does not fit below DM65535");
    }
    v.value = 0.0;
    by_base_[v.dm_address] = i;
  }
  if (by_base_.size() != variables_.size()) {
    throw ConfigError("two variables share a DM address");
  }
  // Ranges are sorted by base; each must end before the next begins.
  for (auto it = by_base_.begin(); it != by_base_.end(); ++it) {
    auto next = std::next(it);
    if (next != by_base_.end() && it->first + kWordsPerLreal > next->first) {
      throw ConfigError("DM ranges of '" + variables_[it->second].name + "' and '" +
                        variables_[next->second].name + "' overlap");
    }
  }
}

std::optional<std::size_t> VariableTable::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) {
      return i;
    }
  }
  return std::nullopt;
}

double VariableTable::value(std::string_view name) const {
  const auto i = index_of(name);
  if (!i) {
    throw NameError("unknown variable '" + std::string(name) + "'");
  }
  return variables_[*i].value;
}

void VariableTable::set_value(std::string_view name, double value) {
  const auto i = index_of(name);
  if (!i) {
    throw NameError("unknown variable '" + std::string(name) + "'");
  }
  variables_[*i].value = value;
}

std::optional<VariableTable::WordRef> VariableTable::locate(std::uint16_t address) const {
  auto it = by_base_.upper_bound(address);
  if (it == by_base_.begin()) {
    return std::nullopt;
  }
  --it;
  const unsigned offset = address - it->first;
  if (offset >= kWordsPerLreal) {
    return std::nullopt;
  }
  return WordRef{it->second, offset};
}

bool VariableTable::mapped(std::uint16_t address, std::uint32_t count) const {
  if (count == 0 || address + count > 0x10000) {
    return false;
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    if (!locate(static_cast<std::uint16_t>(address + i))) {
      return false;
    }
  }
  return true;
}

std::uint16_t VariableTable::read_word(std::uint16_t address) const {
  const auto ref = locate(address);
  if (!ref) {
    throw Error("DM" + std::to_string(address) + " is not mapped");
  }
  const std::uint64_t bits = bits_of(variables_[ref->variable].value);
  return static_cast<std::uint16_t>(bits >> (16 * (kWordsPerLreal - 1 - ref->word)));
}

void VariableTable::write_word(std::uint16_t address, std::uint16_t word) {
  const auto ref = locate(address);
  if (!ref) {
    throw Error("DM" + std::to_string(address) + " is not mapped");
  }
  auto& var = variables_[ref->variable];
  const unsigned shift = 16 * (kWordsPerLreal - 1 - ref->word);
  std::uint64_t bits = bits_of(var.value);
  bits &= ~(std::uint64_t{0xFFFF} << shift);
  bits |= std::uint64_t{word} << shift;
  var.value = double_from_bits(bits);
}

std::vector<Variable> two_variable_fixture() {
  return {Variable{"CIn", 0.0, Publish::Input, 0}, Variable{"COut", 0.0, Publish::Output, 4}};
}

ScanConfig copy_fixture_scan() {
  return ScanConfig{std::chrono::milliseconds{1}, {CopyRule{"CIn", "COut"}}};
}

}  // namespace plcbench::plcsim
