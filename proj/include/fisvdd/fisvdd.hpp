#pragma once

#include "fisvdd/batch_oracle.hpp"
#include "fisvdd/cli.hpp"
#include "fisvdd/csv.hpp"
#include "fisvdd/errors.hpp"
#include "fisvdd/kernel.hpp"
#include "fisvdd/kernel_inverse.hpp"
#include "fisvdd/model.hpp"
#include "fisvdd/model_io.hpp"
