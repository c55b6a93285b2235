// Copyright 2026 The kbreason Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace kbr {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input files: triples, templates, datasets, sessions.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Text that matches no registered template, or more than one equally well.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A generator could not build the requested example from the knowledge base.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Failure talking to a model client (missing ids, bad probabilities, I/O).
class ClientError : public Error {
 public:
  using Error::Error;
};

/// A client answered, but the answer breaks the wire protocol. Not retried.
class ProtocolError : public ClientError {
 public:
  using ClientError::ClientError;
};

/// The client could not be reached or failed mid-request. Retried.
class TransportError : public ClientError {
 public:
  using ClientError::ClientError;
};

}  // namespace kbr
