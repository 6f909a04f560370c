//------------------------------------------------------------------------------
//
//   Copyright 2026 The science-index Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include "science_index/bibliometrics.hpp"
#include "science_index/canonical.hpp"
#include "science_index/clients.hpp"
#include "science_index/error.hpp"
#include "science_index/evaluation.hpp"
#include "science_index/fixture_store.hpp"
#include "science_index/http_transport.hpp"
#include "science_index/ingestion.hpp"
#include "science_index/ledger.hpp"
#include "science_index/numerics.hpp"
#include "science_index/outlier_scaling.hpp"
#include "science_index/rate_limiter.hpp"
#include "science_index/regression.hpp"
#include "science_index/scoring.hpp"
#include "science_index/sha256.hpp"
#include "science_index/synthetic.hpp"
