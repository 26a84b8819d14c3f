#pragma once

#include "lyzero/expsum.hpp"
#include "lyzero/model_spec.hpp"
#include "lyzero/models.hpp"
#include "lyzero/partition.hpp"
#include "lyzero/structure.hpp"
#include "lyzero/theorem.hpp"
#include "lyzero/zeros.hpp"
