#pragma once

#include "qrobust/errors.hpp"
#include "qrobust/ev.hpp"
#include "qrobust/io.hpp"
#include "qrobust/objectives.hpp"
#include "qrobust/parallel.hpp"
#include "qrobust/qaoa.hpp"
#include "qrobust/qubo.hpp"
#include "qrobust/robust.hpp"
#include "qrobust/samplers.hpp"
#include "qrobust/scenario.hpp"
#include "qrobust/seeding.hpp"
#include "qrobust/ucp.hpp"

namespace qrobust {
inline constexpr const char* version = "0.1.0";
}
