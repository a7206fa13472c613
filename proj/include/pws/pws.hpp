//
// Copyright 2026 The PWS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PWS_PWS_HPP_
#define PWS_PWS_HPP_

#include "pws/common.hpp"
#include "pws/estimators.hpp"
#include "pws/experiments.hpp"
#include "pws/frequency_sanitizer.hpp"
#include "pws/io.hpp"
#include "pws/key_sanitizer.hpp"
#include "pws/ordinal.hpp"
#include "pws/privacy.hpp"
#include "pws/random.hpp"
#include "pws/sampling.hpp"
#include "pws/sbh.hpp"

#endif  // PWS_PWS_HPP_
