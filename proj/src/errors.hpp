// Copyright The rismc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace rismc
{

// Scenario or system configuration violates an invariant.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Malformed scenario text.
class ParseError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// A beamformer cannot be constructed for the given channels (empty null
// space, rank-deficient representative channels).
class InfeasibleError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Iterative solver stopped without reaching its residual tolerance.
class SolverError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace rismc
