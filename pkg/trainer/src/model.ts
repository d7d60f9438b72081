/**
 * Model construction from a manifest.
 *
 * Each conv slot becomes conv3x3 (unit padding) -> batch-norm (manifest
 * epsilon) -> ReLU, with 2x2 max pooling where the template flags it; fully
 * connected slots use ReLU; a fixed linear projection onto the class count
 * closes the network. Trainable parameters (kernels, biases, batch-norm
 * scale/shift) must match the manifest's parameter_count exactly.
 *
 * Convolutions use a small custom layer that calls the plain conv2d op
 * rather than the fused conv path: together with the wasm training shim this
 * keeps every gradient on kernels the wasm backend actually provides.
 */

import * as tf from '@tensorflow/tfjs'

import type { Manifest } from './manifest'
import { getTemplate } from './templates'

type KernelInit = ReturnType<typeof tf.initializers.zeros>

export interface BuildOptions {
  /** 'zeros' skips random weight generation for topology-only checks. */
  init?: 'manifest' | 'zeros'
}

/** 3x3 stride-1 same-padding convolution with bias, via plain tf.conv2d. */
class Conv3x3 extends tf.layers.Layer {
  static className = 'Conv3x3'

  private kernel: { read(): tf.Tensor } | null = null
  private bias: { read(): tf.Tensor } | null = null

  constructor(
    private readonly filters: number,
    private readonly kernelInitializer: KernelInit,
    config: { name?: string; inputShape?: number[] } = {},
  ) {
    super(config)
  }

  override build(inputShape: tf.Shape | tf.Shape[]): void {
    const shape = (Array.isArray(inputShape[0]) ? inputShape[0] : inputShape) as number[]
    const channels = shape[3]
    this.kernel = this.addWeight(
      'kernel', [3, 3, channels, this.filters], 'float32', this.kernelInitializer,
    )
    this.bias = this.addWeight(
      'bias', [this.filters], 'float32', tf.initializers.zeros(),
    )
    this.built = true
  }

  override computeOutputShape(inputShape: tf.Shape | tf.Shape[]): tf.Shape {
    const shape = (Array.isArray(inputShape[0]) ? inputShape[0] : inputShape) as number[]
    return [shape[0], shape[1], shape[2], this.filters]
  }

  override call(inputs: tf.Tensor | tf.Tensor[]): tf.Tensor {
    return tf.tidy(() => {
      const x = (Array.isArray(inputs) ? inputs[0] : inputs) as tf.Tensor4D
      const convolved = tf.conv2d(x, this.kernel!.read() as tf.Tensor4D, 1, 'same')
      return tf.add(convolved, this.bias!.read())
    })
  }
}

function kernelInit(
  manifest: Manifest, layerIndex: number, options: BuildOptions,
): KernelInit {
  if (options.init === 'zeros') return tf.initializers.zeros()
  if (manifest.initScheme !== 'he_normal') {
    throw new Error(`unsupported init scheme ${JSON.stringify(manifest.initScheme)}`)
  }
  return tf.initializers.heNormal({ seed: manifest.seed * 1000 + layerIndex })
}

export function buildNetwork(manifest: Manifest, options: BuildOptions = {}): tf.Sequential {
  const template = getTemplate(manifest.template)
  if (manifest.counts.length !== template.slots.length) {
    throw new Error(
      `manifest has ${manifest.counts.length} counts, template ` +
      `${template.name} has ${template.slots.length} slots`,
    )
  }

  const inputShape = [template.inputHeight, template.inputWidth, template.inputChannels]
  const model = tf.sequential()
  let first = true
  let flattened = false
  template.slots.forEach((slot, index) => {
    const width = manifest.counts[index]
    if (slot.kind === 'conv3x3') {
      model.add(new Conv3x3(
        width, kernelInit(manifest, index, options),
        first ? { inputShape } : {},
      ))
      model.add(tf.layers.batchNormalization({ epsilon: manifest.bnEpsilon, momentum: 0.9 }))
      model.add(tf.layers.activation({ activation: 'relu' }))
      if (slot.poolAfter) {
        model.add(tf.layers.maxPooling2d({ poolSize: 2, strides: 2 }))
      }
    } else {
      if (!flattened) {
        model.add(tf.layers.flatten(first ? { inputShape } : {}))
        flattened = true
      }
      model.add(tf.layers.dense({
        units: width,
        activation: 'relu',
        useBias: true,
        kernelInitializer: kernelInit(manifest, index, options),
      }))
    }
    first = false
  })
  if (!flattened) {
    model.add(tf.layers.flatten())
  }
  model.add(tf.layers.dense({
    units: template.classCount,
    useBias: true,
    kernelInitializer: kernelInit(manifest, template.slots.length, options),
  }))
  return model
}

/** Trainable parameter count: kernels, biases, batch-norm gamma/beta; the
 * batch-norm moving statistics are buffers, not parameters. */
export function trainableParameterCount(model: tf.LayersModel): number {
  return model.trainableWeights.reduce((total, weight) => {
    const size = weight.shape.reduce<number>((a, b) => a * (b ?? 1), 1)
    return total + size
  }, 0)
}

/** Sum of squared kernel weights, for the L2 weight-decay penalty. The
 * decay strength wd enters the loss as (wd/2) * sum(w^2), matching plain
 * SGD weight decay. */
export function kernelSquaredNorm(model: tf.LayersModel): tf.Scalar {
  const kernels = model.trainableWeights.filter((w) => w.name.includes('kernel'))
  if (kernels.length === 0) return tf.scalar(0)
  return tf.addN(kernels.map((w) => tf.sum(tf.square(w.read())))) as tf.Scalar
}
