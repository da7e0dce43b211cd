"""Network architectures behind the two adapters.

ResnetGenerator is the standard unpaired-translation generator
(c7s1-64, two stride-2 downs, 9 residual blocks, two transposed-conv
ups, c7s1-3 with tanh, instance norm, reflection padding), so trained
generator weights with matching keys load directly.

HourglassDepthNet is a compact encoder-decoder with skip connections
predicting a single relative-depth channel; larger output = farther.
Both are fully convolutional and run at any resolution divisible by 8
(callers pad and crop).
"""

import torch
from torch import nn


class ResnetBlock(nn.Module):
    def __init__(self, dim):
        super().__init__()
        self.block = nn.Sequential(
            nn.ReflectionPad2d(1),
            nn.Conv2d(dim, dim, kernel_size=3),
            nn.InstanceNorm2d(dim),
            nn.ReLU(inplace=True),
            nn.ReflectionPad2d(1),
            nn.Conv2d(dim, dim, kernel_size=3),
            nn.InstanceNorm2d(dim),
        )

    def forward(self, x):
        return x + self.block(x)


class ResnetGenerator(nn.Module):
    def __init__(self, in_channels=3, out_channels=3, base=64, n_blocks=9):
        super().__init__()
        layers = [
            nn.ReflectionPad2d(3),
            nn.Conv2d(in_channels, base, kernel_size=7),
            nn.InstanceNorm2d(base),
            nn.ReLU(inplace=True),
        ]
        channels = base
        for _ in range(2):
            layers += [
                nn.Conv2d(channels, channels * 2, kernel_size=3, stride=2, padding=1),
                nn.InstanceNorm2d(channels * 2),
                nn.ReLU(inplace=True),
            ]
            channels *= 2
        layers += [ResnetBlock(channels) for _ in range(n_blocks)]
        for _ in range(2):
            layers += [
                nn.ConvTranspose2d(channels, channels // 2, kernel_size=3,
                                   stride=2, padding=1, output_padding=1),
                nn.InstanceNorm2d(channels // 2),
                nn.ReLU(inplace=True),
            ]
            channels //= 2
        layers += [
            nn.ReflectionPad2d(3),
            nn.Conv2d(channels, out_channels, kernel_size=7),
            nn.Tanh(),
        ]
        self.model = nn.Sequential(*layers)

    def forward(self, x):
        return self.model(x)


def _conv_bn_relu(cin, cout, stride=1):
    return nn.Sequential(
        nn.Conv2d(cin, cout, kernel_size=3, stride=stride, padding=1),
        nn.BatchNorm2d(cout),
        nn.ReLU(inplace=True),
    )


class HourglassDepthNet(nn.Module):
    def __init__(self, in_channels=3, base=32):
        super().__init__()
        self.enc1 = _conv_bn_relu(in_channels, base)
        self.down1 = _conv_bn_relu(base, base * 2, stride=2)
        self.enc2 = _conv_bn_relu(base * 2, base * 2)
        self.down2 = _conv_bn_relu(base * 2, base * 4, stride=2)
        self.enc3 = _conv_bn_relu(base * 4, base * 4)
        self.down3 = _conv_bn_relu(base * 4, base * 8, stride=2)
        self.bottleneck = nn.Sequential(
            _conv_bn_relu(base * 8, base * 8),
            _conv_bn_relu(base * 8, base * 8),
        )
        self.up3 = nn.ConvTranspose2d(base * 8, base * 4, kernel_size=2, stride=2)
        self.dec3 = _conv_bn_relu(base * 8, base * 4)
        self.up2 = nn.ConvTranspose2d(base * 4, base * 2, kernel_size=2, stride=2)
        self.dec2 = _conv_bn_relu(base * 4, base * 2)
        self.up1 = nn.ConvTranspose2d(base * 2, base, kernel_size=2, stride=2)
        self.dec1 = _conv_bn_relu(base * 2, base)
        self.head = nn.Conv2d(base, 1, kernel_size=3, padding=1)

    def forward(self, x):
        e1 = self.enc1(x)
        e2 = self.enc2(self.down1(e1))
        e3 = self.enc3(self.down2(e2))
        b = self.bottleneck(self.down3(e3))
        d3 = self.dec3(torch.cat([self.up3(b), e3], dim=1))
        d2 = self.dec2(torch.cat([self.up2(d3), e2], dim=1))
        d1 = self.dec1(torch.cat([self.up1(d2), e1], dim=1))
        return self.head(d1)


def build_model(kind: str) -> nn.Module:
    if kind == "style":
        return ResnetGenerator()
    if kind == "depth":
        return HourglassDepthNet()
    raise ValueError(f"unknown model kind {kind!r}")
