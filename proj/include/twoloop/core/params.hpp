#pragma once

#include <set>
#include <string>

#include "twoloop/core/error.hpp"
#include "twoloop/core/types.hpp"

namespace twoloop {

/// Reads a JSON parameter block with defaults. Every error names the JSON
/// pointer of the offending key; finish() rejects keys that were never read.
class ParamReader {
 public:
  ParamReader(const Json& block, std::string pointer)
      : block_(block), pointer_(std::move(pointer)) {
    if (!block_.is_null() && !block_.is_object()) {
      throw config_error(pointer_ + " must be an object", pointer_);
    }
  }

  bool has(const std::string& key) const { return block_.is_object() && block_.contains(key); }

  std::string pointer(const std::string& key) const { return pointer_ + "/" + key; }

  template <class T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    return convert<T>(key);
  }

  template <class T>
  T require(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) throw config_error("missing required key '" + key + "'", pointer(key));
    return convert<T>(key);
  }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    static const Json null_json;
    return has(key) ? block_.at(key) : null_json;
  }

  void finish() const {
    if (!block_.is_object()) return;
    for (const auto& [key, value] : block_.items()) {
      if (!seen_.count(key)) throw config_error("unknown key '" + key + "'", pointer(key));
    }
  }

 private:
  template <class T>
  T convert(const std::string& key) const {
    const Json& v = block_.at(key);
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw config_error("'" + key + "' must be a number", pointer(key));
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<long long>() < 0)) {
        throw config_error("'" + key + "' must be a non-negative integer", pointer(key));
      }
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw config_error("'" + key + "' must be true or false", pointer(key));
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw config_error("'" + key + "' must be a string", pointer(key));
    }
    try {
      return v.get<T>();
    } catch (const Json::exception&) {
      throw config_error("'" + key + "' has the wrong type", pointer(key));
    }
  }

  Json block_;
  std::string pointer_;
  std::set<std::string> seen_;
};

}  // namespace twoloop
