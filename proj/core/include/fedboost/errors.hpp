/*
 * Copyright 2026 the fedboost authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace fedboost {

/// Bad argument or violated precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fixed-point value does not fit the plaintext space.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Prime/parameter search exhausted its attempt budget.
class GenerationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unmasked value is not a valid plaintext encoding. Decrypting anything
/// other than a complete aggregate lands here.
class MalformedCiphertext : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// AEAD tag mismatch: transport ciphertext was tampered with or keyed wrong.
class AuthenticationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fewer shares than the reconstruction threshold.
class InsufficientShares : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller is not on the active list for this aggregation round.
class NotActive : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Aggregation state is missing required vectors/reveals.
class ProtocolIncomplete : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The current protocol round cannot complete (e.g. too many dropouts).
class RoundAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fedboost
