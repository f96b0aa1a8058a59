def execute_command(image):
    image_patch = ImagePatch(image)
    bin_patches = image_patch.find('bin')
    if len(bin_patches) == 0:
        return {'function': 'None', 'error': 'No bin found.'}
    bin_patches.sort(key=lambda x: x.horizontal_center)
    rightmost_bin = bin_patches[-1]
    return {'function': 'navigate_to_object', 'inputs': (rightmost_bin.horizontal_center, rightmost_bin.vertical_center), 'box': [rightmost_bin.left, rightmost_bin.lower, rightmost_bin.right, rightmost_bin.upper]}
