#pragma once

#include "freelip/config.hpp"
#include "freelip/errors.hpp"
#include "freelip/flow_norm.hpp"
#include "freelip/io.hpp"
#include "freelip/maps.hpp"
#include "freelip/metric_space.hpp"
#include "freelip/molecule.hpp"
#include "freelip/random.hpp"
#include "freelip/sampling.hpp"
#include "freelip/suite.hpp"
#include "freelip/transport_dual.hpp"
