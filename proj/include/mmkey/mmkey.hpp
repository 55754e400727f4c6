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

#pragma once

#include "mmkey/antenna.hpp"
#include "mmkey/channel.hpp"
#include "mmkey/config.hpp"
#include "mmkey/error.hpp"
#include "mmkey/galois.hpp"
#include "mmkey/geometry.hpp"
#include "mmkey/harness.hpp"
#include "mmkey/parallel.hpp"
#include "mmkey/platoon.hpp"
#include "mmkey/raytrace.hpp"
#include "mmkey/report.hpp"
#include "mmkey/rfmath.hpp"
#include "mmkey/secrecy.hpp"
#include "mmkey/sls.hpp"
#include "mmkey/spatial.hpp"
