"""Site percolation on d-regular graphs, explored by depth-first search."""

from .analysis import (ExpansionParams, ThresholdParams, bad_vertex_count, check_subcritical,
                       check_supercritical, enumerate_non_expanding, is_non_expanding,
                       stream_properties, subcritical_component_bound, supercritical_targets)
from .exploration import (CoinStream, DFSExploration, EpochRecord, RunReport, direct_sample_oracle,
                          find_cycle_from_path, longest_path_lower_bound, run_dfs_percolation)
from .generators import (GenerationError, GeneratorSpec, circulant, complete, cycle, disjoint_cliques,
                         hypercube, random_regular)
from .graph import (Graph, GraphInputError, VertexSet, connected_components, external_neighborhood,
                    internal_edge_count, neighbors, ordered_pair_edge_count, read_edge_list,
                    write_edge_list)
from .harness import SweepConfig, SweepRow, SweepTable, estimate_threshold, run_sweep
from .spectral import (NumericalError, SpectralReport, edge_exists_between, low_degree_set,
                       mixing_lemma_check, spectral_report)

__version__ = "0.1.0"
