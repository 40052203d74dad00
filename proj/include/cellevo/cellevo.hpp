#pragma once

#include "cellevo/assumptions.hpp"
#include "cellevo/combo.hpp"
#include "cellevo/config.hpp"
#include "cellevo/errors.hpp"
#include "cellevo/grid.hpp"
#include "cellevo/mono.hpp"
#include "cellevo/output.hpp"
#include "cellevo/rates.hpp"
#include "cellevo/theory.hpp"
