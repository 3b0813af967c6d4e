from propnet import ArchSpec

######################
# TEST CASES LAYERS  #
######################

# (channels in, channels out, height, width, stride)
TEST_CONV_ADJOINT = [
    (1, 1, 4, 4, 1),
    (2, 3, 5, 7, 1),
    (8, 4, 16, 16, 1),
    (1, 1, 4, 4, 2),
    (3, 2, 7, 5, 2),
    (8, 8, 16, 16, 2),
]
# (channels in, channels out, height, width)
TEST_DECONV_ADJOINT = [
    (1, 1, 2, 2),
    (4, 2, 3, 5),
    (8, 8, 8, 8),
    (2, 8, 8, 4),
]

#####################
# TEST CASES MODEL  #
#####################

TEST_LAYERS = [
    (
        ArchSpec(base_channels=4, depth=2),
        [
            ("enc_0", "conv2", (4, 8, 3, 3)),
            ("enc_1", "conv2", (8, 4, 3, 3)),
            ("up_1", "deconv", (8, 4, 3, 3)),
            ("fuse_1", "conv1", (4, 8, 3, 3)),
            ("up_0", "deconv", (4, 4, 3, 3)),
            ("head", "conv1", (1, 12, 3, 3)),
        ],
    ),
    (
        ArchSpec(in_channels=2, base_channels=3, depth=1),
        [
            ("enc_0", "conv2", (3, 2, 3, 3)),
            ("up_0", "deconv", (3, 3, 3, 3)),
            ("head", "conv1", (1, 5, 3, 3)),
        ],
    ),
]
TEST_ARCH_SPEC_ERROR = [
    ({"depth": 0}, "The parameter `depth` must be a strictly positive integer, but got 0."),
    ({"base_channels": 4.0}, "The parameter `base_channels` must be a strictly positive integer, but got 4.0."),
    ({"in_channels": -8}, "The parameter `in_channels` must be a strictly positive integer, but got -8."),
]
