/**
 * Training support for the wasm backend.
 *
 * tfjs-backend-wasm ships forward kernels plus Conv2DBackpropInput and
 * MaxPoolGrad, but not Conv2DBackpropFilter, so conv nets cannot train on it
 * out of the box. For stride-1 convolutions the filter gradient is itself a
 * convolution with batch and channel axes swapped:
 *
 *   dW[kh, kw, ci, co] = sum_{n, oh, ow} X[n, oh+kh-p, ow+kw-p, ci] * dY[n, oh, ow, co]
 *                      = conv2d(X^T, dY^T) with X as [Ci, H, W, N] input and
 *                        dY as [OH, OW, N, Co] filter, valid padding.
 *
 * This module swaps the Conv2D op's gradient for that composition, keeping
 * the registered Conv2DBackpropInput kernel for the input gradient. The
 * model builder pairs this with plain (non-fused) conv2d calls, so the
 * missing kernel is never dispatched. The composition is validated against
 * the cpu backend's native gradients in tests; it supports what the
 * trainer's networks use: NHWC, stride 1, dilation 1.
 */

import * as tf from '@tensorflow/tfjs'

type Pad = 'same' | 'valid' | number

let installed = false

function spatialPadding(pad: Pad, filterHeight: number, filterWidth: number): [number, number][] {
  if (pad === 'valid' || pad === 0) return [[0, 0], [0, 0]]
  if (pad === 'same') {
    const top = Math.floor((filterHeight - 1) / 2)
    const left = Math.floor((filterWidth - 1) / 2)
    return [[top, filterHeight - 1 - top], [left, filterWidth - 1 - left]]
  }
  return [[pad, pad], [pad, pad]]
}

/** Filter gradient of a stride-1 conv2d, built from forward ops only. */
export function conv2dFilterGradViaConv(
  x: tf.Tensor4D,
  dy: tf.Tensor4D,
  filterHeight: number,
  filterWidth: number,
  pad: Pad,
): tf.Tensor4D {
  return tf.tidy(() => {
    const [[top, bottom], [left, right]] = spatialPadding(pad, filterHeight, filterWidth)
    const padded = top || bottom || left || right
      ? tf.pad(x, [[0, 0], [top, bottom], [left, right], [0, 0]])
      : x
    const xAsBatch = tf.transpose(padded, [3, 1, 2, 0]) // [Ci, H', W', N]
    const dyAsFilter = tf.transpose(dy, [1, 2, 0, 3]) // [OH, OW, N, Co]
    const grads = tf.conv2d(
      xAsBatch as tf.Tensor4D, dyAsFilter as tf.Tensor4D, 1, 'valid',
    ) // [Ci, KH, KW, Co]
    return tf.transpose(grads, [1, 2, 0, 3]) as tf.Tensor4D // [KH, KW, Ci, Co]
  })
}

/** Replace the Conv2D gradient with the composition above. Idempotent; call
 * before training. The override computes identical values on every backend,
 * so installing it globally is safe. */
export function installWasmTrainingShim(): void {
  if (installed) return
  tf.unregisterGradient('Conv2D')
  tf.registerGradient({
    kernelName: 'Conv2D',
    inputsToSave: ['x', 'filter'],
    gradFunc: (dy, saved, attrs) => {
      const [x, filter] = saved as [tf.Tensor4D, tf.Tensor4D]
      const anyAttrs = attrs as unknown as {
        strides: number | [number, number]
        pad: Pad
        dataFormat?: string
        dilations?: number | [number, number]
      }
      const strides = Array.isArray(anyAttrs.strides)
        ? anyAttrs.strides : [anyAttrs.strides, anyAttrs.strides]
      const dilations = Array.isArray(anyAttrs.dilations ?? 1)
        ? (anyAttrs.dilations as number[]) : [anyAttrs.dilations ?? 1, anyAttrs.dilations ?? 1]
      if (strides.some((s) => s !== 1) || dilations.some((d) => d !== 1)) {
        throw new Error(
          'wasm training shim supports stride-1, dilation-1 convolutions only',
        )
      }
      if (anyAttrs.dataFormat && anyAttrs.dataFormat !== 'NHWC') {
        throw new Error(`wasm training shim supports NHWC only, got ${anyAttrs.dataFormat}`)
      }
      return {
        x: () => tf.conv2dTranspose(
          dy as tf.Tensor4D, filter, x.shape, 1, anyAttrs.pad as 'same' | 'valid',
        ),
        filter: () => conv2dFilterGradViaConv(
          x, dy as tf.Tensor4D, filter.shape[0], filter.shape[1], anyAttrs.pad,
        ),
      }
    },
  })
  installed = true
}
