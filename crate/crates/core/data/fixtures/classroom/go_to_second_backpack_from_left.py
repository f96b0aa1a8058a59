def execute_command(image):
    image_patch = ImagePatch(image)
    backpack_patches = image_patch.find('backpack')
    if len(backpack_patches) == 0:
        return {'function': 'None', 'error': 'No backpack found.'}
    backpack_patches.sort(key=lambda x: x.horizontal_center)
    second_backpack = backpack_patches[1]
    return {'function': 'navigate_to_object', 'inputs': (second_backpack.horizontal_center, second_backpack.vertical_center), 'box': [second_backpack.left, second_backpack.lower, second_backpack.right, second_backpack.upper]}
