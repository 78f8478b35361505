// Copyright 2026 The proxyvote Authors
// SPDX-License-Identifier: Apache-2.0

#include "proxyvote/field.hpp"

namespace proxyvote {

std::size_t Mask::count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < size(); ++i) n += contains(i) ? 1 : 0;
  return n;
}

std::vector<std::size_t> Mask::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

}  // namespace proxyvote
