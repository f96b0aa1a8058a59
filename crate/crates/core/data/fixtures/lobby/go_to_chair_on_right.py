def execute_command(image):
    image_patch = ImagePatch(image)
    chair_patches = image_patch.find('chair')
    if len(chair_patches) == 0:
        return {'function': 'None', 'error': 'No chair found.'}
    chair_patches.sort(key=lambda x: x.horizontal_center)
    right_chair = chair_patches[-1]
    return {'function': 'navigate_to_object', 'inputs': (right_chair.horizontal_center, right_chair.vertical_center), 'box': [right_chair.left, right_chair.lower, right_chair.right, right_chair.upper]}
