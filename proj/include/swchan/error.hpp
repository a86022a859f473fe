// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace swchan
{

// Base for every error raised by the library.
class error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Argument or type-invariant violation (bad flag, out-of-range parameter).
class validation_error : public error
{
  public:
    using error::error;
};

// Problem with input data (malformed rows, too few samples, unreadable file).
class data_error : public error
{
  public:
    using error::error;
};

class distance_below_reference : public validation_error
{
  public:
    distance_below_reference(double d_m, double d0_m);
};

class invalid_extrema : public validation_error
{
  public:
    using validation_error::validation_error;
};

class band_mismatch : public validation_error
{
  public:
    using validation_error::validation_error;
};

class degenerate_input : public data_error
{
  public:
    using data_error::data_error;
};

class insufficient_extrema : public error
{
  public:
    using error::error;
};

} // namespace swchan
