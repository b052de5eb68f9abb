"""Training objectives: LLETS, the DPP diversity loss and vicinal GAN losses."""
from .llets import (
    DEFAULT_CUTOFF,
    LLETSParams,
    conditioning_error,
    lambert_w0,
    llets_params,
    llets_score,
)
from .dpp import Q_MIN, DPPBatchKernel, build_kernel, logdet_psd, pcd_loss, rbf_kernel
from .vicinal import (
    GeneratorPass,
    VicinalBatch,
    VicinalConfig,
    build_vicinal_batch,
    discriminator_loss,
    discriminator_loss_terms,
    gamma1_schedule,
    generator_loss,
    generator_pass,
    rule_of_thumb,
    sample_centers,
    sample_singular_label,
    sample_uniform_labels,
    total_generator_loss,
)

__all__ = [
    'DEFAULT_CUTOFF',
    'LLETSParams',
    'conditioning_error',
    'lambert_w0',
    'llets_params',
    'llets_score',
    'Q_MIN',
    'DPPBatchKernel',
    'build_kernel',
    'logdet_psd',
    'pcd_loss',
    'rbf_kernel',
    'GeneratorPass',
    'VicinalBatch',
    'VicinalConfig',
    'build_vicinal_batch',
    'discriminator_loss',
    'discriminator_loss_terms',
    'gamma1_schedule',
    'generator_loss',
    'generator_pass',
    'rule_of_thumb',
    'sample_centers',
    'sample_singular_label',
    'sample_uniform_labels',
    'total_generator_loss',
]
