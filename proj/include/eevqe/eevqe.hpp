// Copyright 2026 The eevqe Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Umbrella header for the eevqe library.
 */
#pragma once
#include "cartan.hpp"
#include "circuit.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "hamiltonian.hpp"
#include "kernels.hpp"
#include "linalg.hpp"
#include "mera_bfgs.hpp"
#include "mera_contract.hpp"
#include "mera_network.hpp"
#include "mera_optimizer.hpp"
#include "optim.hpp"
#include "pauli_sum.hpp"
#include "random.hpp"
#include "run_history.hpp"
#include "statevector.hpp"
#include "tensor.hpp"
#include "vqe.hpp"
