// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cartography/completeness.hpp"
#include "cartography/datamap.hpp"
#include "cartography/dataset_io.hpp"
#include "cartography/dynamics.hpp"
#include "cartography/epoch_record.hpp"
#include "cartography/error.hpp"
#include "cartography/experiment.hpp"
#include "cartography/features.hpp"
#include "cartography/label.hpp"
#include "cartography/log_ingest.hpp"
#include "cartography/model.hpp"
#include "cartography/random.hpp"
#include "cartography/subsetter.hpp"
#include "cartography/text.hpp"
#include "cartography/trainer.hpp"
