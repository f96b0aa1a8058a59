def execute_command(image):
    image_patch = ImagePatch(image)
    bench_patches = image_patch.find('bench')
    if len(bench_patches) == 0:
        return {'function': 'None', 'error': 'No bench found.'}
    bench = bench_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (bench.horizontal_center, bench.vertical_center), 'box': [bench.left, bench.lower, bench.right, bench.upper]}
