#pragma once

#include "airdisk/error.hpp"
#include "airdisk/numeric.hpp"
#include "airdisk/model.hpp"
#include "airdisk/schedule.hpp"
#include "airdisk/evaluate.hpp"
#include "airdisk/transforms.hpp"
#include "airdisk/lower_bound.hpp"
#include "airdisk/schedulers.hpp"
#include "airdisk/necklace.hpp"
#include "airdisk/oracle.hpp"
#include "airdisk/ptas.hpp"
#include "airdisk/workload.hpp"
