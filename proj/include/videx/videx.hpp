#pragma once

#include "videx/common.hpp"
#include "videx/scalar.hpp"
#include "videx/catalog.hpp"
#include "videx/collector.hpp"
#include "videx/range_cond.hpp"
#include "videx/sql.hpp"
#include "videx/estimator.hpp"
#include "videx/wire.hpp"
#include "videx/stat_server.hpp"
#include "videx/optimizer.hpp"
#include "videx/whatif.hpp"
#include "videx/synthetic.hpp"
